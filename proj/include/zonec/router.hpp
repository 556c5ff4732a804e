#pragma once

#include "zonec/arch.hpp"
#include "zonec/compat.hpp"
#include "zonec/placer.hpp"

#include <algorithm>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace zonec {

struct RoutingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One physical atom movement of a rearrangement step.
struct AtomMove {
  uint32_t atom = 0;
  TrapAddress fromTrap;
  TrapAddress toTrap;
  Vec2 from;
  Vec2 to;
  double dist = 0.0;
};

/**
 * A pickup-move-drop cycle of mutually compatible movements. Transfers are
 * split into batches where activating the AOD rows and columns jointly
 * would touch a bystander atom at a grid intersection.
 */
struct RearrangementStep {
  std::vector<AtomMove> movements;
  std::vector<std::vector<uint32_t>> pickupBatches;
  std::vector<std::vector<uint32_t>> dropBatches;
  double maxDist = 0.0;
};

struct Route {
  std::vector<RearrangementStep> steps;
};

namespace detail {

// positions are quantized to nanometers so grid intersections compare exactly
inline auto coordKey(double um) -> int64_t {
  return static_cast<int64_t>(std::llround(um * 1000.0));
}
inline auto posKey(const Vec2& p) -> uint64_t {
  return (static_cast<uint64_t>(static_cast<uint32_t>(coordKey(p.x))) << 32) |
         static_cast<uint64_t>(static_cast<uint32_t>(coordKey(p.y)));
}

} // namespace detail

/// Set of occupied physical positions, nanometer-quantized.
class PosSet {
public:
  void insert(const Vec2& p) { set_.insert(detail::posKey(p)); }
  void erase(const Vec2& p) { set_.erase(detail::posKey(p)); }
  [[nodiscard]] auto contains(const Vec2& p) const -> bool {
    return set_.contains(detail::posKey(p));
  }
  [[nodiscard]] auto contains(int64_t xKey, int64_t yKey) const -> bool {
    return set_.contains(
        (static_cast<uint64_t>(static_cast<uint32_t>(xKey)) << 32) |
        static_cast<uint64_t>(static_cast<uint32_t>(yKey)));
  }
  [[nodiscard]] auto size() const -> size_t { return set_.size(); }

private:
  std::unordered_set<uint64_t> set_;
};

enum class BatchEndpoint : uint8_t { Source, Target };

namespace detail {

/// True iff every occupied intersection of the batch's active rows and
/// columns belongs to the batch itself.
inline auto batchRespectsGhostSpots(std::span<const AtomMove> movements,
                                    std::span<const uint32_t> batch,
                                    const PosSet& occupied,
                                    BatchEndpoint endpoint) -> bool {
  std::vector<int64_t> rows;
  std::vector<int64_t> cols;
  std::unordered_set<uint64_t> own;
  auto posOf = [&](const AtomMove& m) {
    return endpoint == BatchEndpoint::Source ? m.from : m.to;
  };
  for (const uint32_t idx : batch) {
    const Vec2 p = posOf(movements[idx]);
    rows.push_back(coordKey(p.y));
    cols.push_back(coordKey(p.x));
    own.insert(posKey(p));
  }
  auto dedupe = [](std::vector<int64_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(rows);
  dedupe(cols);
  for (const int64_t y : rows) {
    for (const int64_t x : cols) {
      if (occupied.contains(x, y) &&
          !own.contains(
              (static_cast<uint64_t>(static_cast<uint32_t>(x)) << 32) |
              static_cast<uint64_t>(static_cast<uint32_t>(y)))) {
        return false;
      }
    }
  }
  return true;
}

} // namespace detail

/**
 * Greedy row-major partition of the step's atoms into transfer batches that
 * respect the ghost-spot condition. `occupancy` holds the trap occupancy
 * right before the first batch of this endpoint: for pickups that includes
 * the step's own atoms still sitting in their sources, for drops the
 * non-moving atoms plus anything already dropped. A singleton batch is
 * always valid, so the partition always exists.
 */
inline auto splitGhostBatches(std::span<const AtomMove> movements,
                              const PosSet& occupancy, BatchEndpoint endpoint)
    -> std::vector<std::vector<uint32_t>> {
  std::vector<uint32_t> order(movements.size());
  for (uint32_t i = 0; i < movements.size(); ++i) {
    order[i] = i;
  }
  auto posOf = [&](uint32_t idx) {
    return endpoint == BatchEndpoint::Source ? movements[idx].from
                                             : movements[idx].to;
  };
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    const Vec2 pa = posOf(a);
    const Vec2 pb = posOf(b);
    return std::tie(pa.y, pa.x) < std::tie(pb.y, pb.x);
  });

  PosSet occ = occupancy;
  std::vector<std::vector<uint32_t>> batches;
  std::vector<uint32_t> current;
  auto flush = [&]() {
    if (current.empty()) {
      return;
    }
    for (const uint32_t idx : current) {
      if (endpoint == BatchEndpoint::Source) {
        occ.erase(movements[idx].from);
      } else {
        occ.insert(movements[idx].to);
      }
    }
    batches.push_back(std::move(current));
    current.clear();
  };
  for (const uint32_t idx : order) {
    current.push_back(idx);
    if (!detail::batchRespectsGhostSpots(movements, current, occ, endpoint)) {
      current.pop_back();
      flush();
      current.push_back(idx);
    }
  }
  flush();
  // convert movement indices to atom ids
  std::vector<std::vector<uint32_t>> atomBatches;
  atomBatches.reserve(batches.size());
  for (const auto& b : batches) {
    std::vector<uint32_t> atoms;
    atoms.reserve(b.size());
    for (const uint32_t idx : b) {
      atoms.push_back(movements[idx].atom);
    }
    atomBatches.push_back(std::move(atoms));
  }
  return atomBatches;
}

/**
 * Pure constraint check, the routing test oracle: pairwise order- and
 * identity-preservation on both axes plus the ghost-spot condition of every
 * batch against the evolving occupancy. Deliberately brute force and
 * independent of the grouping structure the router builds with.
 */
inline auto verifyStep(const RearrangementStep& step, const PosSet& occupancy)
    -> bool {
  const auto& ms = step.movements;
  auto sgn = [](int64_t a, int64_t b) { return (a > b) - (a < b); };
  for (size_t i = 0; i < ms.size(); ++i) {
    for (size_t j = i + 1; j < ms.size(); ++j) {
      const auto sy = sgn(detail::coordKey(ms[i].from.y),
                          detail::coordKey(ms[j].from.y));
      const auto ty =
          sgn(detail::coordKey(ms[i].to.y), detail::coordKey(ms[j].to.y));
      const auto sx = sgn(detail::coordKey(ms[i].from.x),
                          detail::coordKey(ms[j].from.x));
      const auto tx =
          sgn(detail::coordKey(ms[i].to.x), detail::coordKey(ms[j].to.x));
      if (sy != ty || sx != tx) {
        return false;
      }
    }
  }
  // every moved atom in exactly one pickup and one drop batch
  std::unordered_map<uint32_t, size_t> movementOf;
  for (size_t i = 0; i < ms.size(); ++i) {
    movementOf.emplace(ms[i].atom, i);
  }
  auto coversAll = [&](const std::vector<std::vector<uint32_t>>& batches) {
    std::unordered_set<uint32_t> seen;
    for (const auto& b : batches) {
      if (b.empty()) {
        return false;
      }
      for (const uint32_t atom : b) {
        if (!movementOf.contains(atom) || !seen.insert(atom).second) {
          return false;
        }
      }
    }
    return seen.size() == ms.size();
  };
  if (!coversAll(step.pickupBatches) || !coversAll(step.dropBatches)) {
    return false;
  }
  // pickups against evolving occupancy
  PosSet occ = occupancy;
  for (const auto& batch : step.pickupBatches) {
    std::vector<uint32_t> idx;
    idx.reserve(batch.size());
    for (const uint32_t atom : batch) {
      idx.push_back(static_cast<uint32_t>(movementOf.at(atom)));
    }
    if (!detail::batchRespectsGhostSpots(ms, idx, occ,
                                         BatchEndpoint::Source)) {
      return false;
    }
    for (const uint32_t i : idx) {
      occ.erase(ms[i].from);
    }
  }
  // drops: target must be free, then the batch must hit no bystander
  for (const auto& batch : step.dropBatches) {
    std::vector<uint32_t> idx;
    idx.reserve(batch.size());
    for (const uint32_t atom : batch) {
      idx.push_back(static_cast<uint32_t>(movementOf.at(atom)));
    }
    for (const uint32_t i : idx) {
      if (occ.contains(ms[i].to)) {
        return false;
      }
      occ.insert(ms[i].to);
    }
    if (!detail::batchRespectsGhostSpots(ms, idx, occ,
                                         BatchEndpoint::Target)) {
      return false;
    }
  }
  return true;
}

namespace detail {

struct PendingStep {
  std::vector<AtomMove> movements;
  double maxDist = 0.0;
};

inline auto stepFromMoves(std::vector<AtomMove> moves) -> PendingStep {
  PendingStep s;
  s.maxDist = 0.0;
  for (const auto& m : moves) {
    s.maxDist = std::max(s.maxDist, m.dist);
  }
  s.movements = std::move(moves);
  return s;
}

} // namespace detail

/**
 * Turns a placement transition into rearrangement steps. Movements are
 * grouped first-fit in descending-distance order with the compatibility
 * structure, one step per group, steps ordered by descending max distance.
 * A step whose target trap is still occupied waits for the step vacating
 * it; cyclic waits are broken by parking one blocking atom on a free
 * auxiliary trap of its destination zone first.
 */
inline auto routeTransition(const Placement& from, const Placement& to,
                            const Architecture& arch) -> Route {
  if (from.numAtoms() != to.numAtoms()) {
    throw RoutingError("placements cover different atom sets");
  }
  const size_t n = from.numAtoms();
  std::unordered_map<uint64_t, uint32_t> staticAtomAt; // non-movers by trap
  std::vector<uint32_t> movers;
  for (uint32_t atom = 0; atom < n; ++atom) {
    if (from.assignment[atom] == to.assignment[atom]) {
      staticAtomAt.emplace(detail::posKey(arch.trapPosition(
                               from.assignment[atom])),
                           atom);
    } else {
      movers.push_back(atom);
    }
  }
  for (const uint32_t atom : movers) {
    const auto key = detail::posKey(arch.trapPosition(to.assignment[atom]));
    if (staticAtomAt.contains(key)) {
      const auto& t = to.assignment[atom];
      throw RoutingError("target trap (zone " + arch.zone(t.zone).id +
                         ", row " + std::to_string(t.row) + ", col " +
                         std::to_string(t.col) +
                         ") is occupied by a non-moving atom");
    }
  }
  Route route;
  if (movers.empty()) {
    return route;
  }

  // grouping: sources ranked among movers, targets ranked among targets
  auto buildSteps = [&arch](const std::vector<AtomMove>& moves)
      -> std::vector<detail::PendingStep> {
    std::vector<AtomMove> ordered = moves;
    std::sort(ordered.begin(), ordered.end(),
              [](const AtomMove& a, const AtomMove& b) {
                return std::tie(b.dist, a.atom) < std::tie(a.dist, b.atom);
              });
    std::vector<std::pair<uint32_t, Vec2>> srcList;
    std::vector<std::pair<uint32_t, Vec2>> dstList;
    srcList.reserve(ordered.size());
    dstList.reserve(ordered.size());
    for (const auto& m : ordered) {
      srcList.emplace_back(m.atom, m.from);
      dstList.emplace_back(m.atom, m.to);
    }
    const auto srcOf = discretize(srcList);
    const auto dstOf = discretize(dstList);
    GroupSet groups{/*trackMembers=*/true};
    std::unordered_map<uint32_t, const AtomMove*> moveOf;
    for (const auto& m : ordered) {
      moveOf.emplace(m.atom, &m);
      groups.insert({m.atom, srcOf.at(m.atom).row, srcOf.at(m.atom).col,
                     dstOf.at(m.atom).row, dstOf.at(m.atom).col, m.dist});
    }
    std::vector<detail::PendingStep> steps;
    steps.reserve(groups.size());
    for (const auto& g : groups.groups()) {
      std::vector<AtomMove> stepMoves;
      stepMoves.reserve(g.members().size());
      for (const auto& member : g.members()) {
        stepMoves.push_back(*moveOf.at(member.atom));
      }
      steps.push_back(detail::stepFromMoves(std::move(stepMoves)));
    }
    return steps;
  };

  std::vector<AtomMove> allMoves;
  allMoves.reserve(movers.size());
  for (const uint32_t atom : movers) {
    const Vec2 src = arch.trapPosition(from.assignment[atom]);
    const Vec2 dst = arch.trapPosition(to.assignment[atom]);
    allMoves.push_back({atom, from.assignment[atom], to.assignment[atom], src,
                        dst, norm(dst - src)});
  }
  auto pending = buildSteps(allMoves);

  // occupancy: every atom's current physical position
  PosSet occupancy;
  std::vector<Vec2> positionOf(n);
  for (uint32_t atom = 0; atom < n; ++atom) {
    positionOf[atom] = arch.trapPosition(from.assignment[atom]);
    occupancy.insert(positionOf[atom]);
  }
  TrapSet trapsInUse; // current traps plus all pending targets, for aux picks
  for (uint32_t atom = 0; atom < n; ++atom) {
    trapsInUse.insert(from.assignment[atom]);
    trapsInUse.insert(to.assignment[atom]);
  }

  auto stepReady = [&](const detail::PendingStep& s) {
    // a target occupied by one of the step's own movers is fine, the whole
    // step lifts off before anything drops
    std::unordered_set<uint64_t> ownSources;
    for (const auto& m : s.movements) {
      ownSources.insert(detail::posKey(m.from));
    }
    for (const auto& m : s.movements) {
      if (occupancy.contains(m.to) &&
          !ownSources.contains(detail::posKey(m.to))) {
        return false;
      }
    }
    return true;
  };
  auto emitStep = [&](detail::PendingStep s) {
    RearrangementStep step;
    step.maxDist = s.maxDist;
    step.movements = std::move(s.movements);
    step.pickupBatches =
        splitGhostBatches(step.movements, occupancy, BatchEndpoint::Source);
    PosSet afterPickup = occupancy;
    for (const auto& m : step.movements) {
      afterPickup.erase(m.from);
    }
    step.dropBatches =
        splitGhostBatches(step.movements, afterPickup, BatchEndpoint::Target);
    for (const auto& m : step.movements) {
      occupancy.erase(m.from);
    }
    for (const auto& m : step.movements) {
      occupancy.insert(m.to);
      positionOf[m.atom] = m.to;
    }
    route.steps.push_back(std::move(step));
  };

  size_t bufferedAtoms = 0;
  while (!pending.empty()) {
    // take the ready step with the largest max distance
    size_t pick = pending.size();
    for (size_t i = 0; i < pending.size(); ++i) {
      if (!stepReady(pending[i])) {
        continue;
      }
      if (pick == pending.size() ||
          pending[i].maxDist > pending[pick].maxDist) {
        pick = i;
      }
    }
    if (pick < pending.size()) {
      auto step = std::move(pending[pick]);
      pending.erase(pending.begin() +
                    static_cast<std::ptrdiff_t>(pick));
      emitStep(std::move(step));
      continue;
    }
    // cyclic wait: park the smallest-id blocking atom on an aux trap in the
    // zone of its own destination
    if (++bufferedAtoms > 2 * n) {
      throw RoutingError("routing failed to break transient conflicts");
    }
    uint32_t blocker = std::numeric_limits<uint32_t>::max();
    for (const auto& s : pending) {
      for (const auto& m : s.movements) {
        if (occupancy.contains(m.to)) {
          // the atom sitting on m.to is a pending mover (static occupants
          // were rejected upfront)
          for (const auto& s2 : pending) {
            for (const auto& m2 : s2.movements) {
              if (detail::posKey(positionOf[m2.atom]) ==
                  detail::posKey(m.to)) {
                blocker = std::min(blocker, m2.atom);
              }
            }
          }
        }
      }
    }
    if (blocker == std::numeric_limits<uint32_t>::max()) {
      throw RoutingError("routing stalled without an identifiable blocker");
    }
    // pull the blocker's movement out, keep everything else pending
    std::vector<AtomMove> rest;
    AtomMove blockerMove{};
    for (const auto& s : pending) {
      for (const auto& m : s.movements) {
        if (m.atom == blocker) {
          blockerMove = m;
        } else {
          rest.push_back(m);
        }
      }
    }
    // aux trap: nearest free trap to the blocker's target, in its zone
    const auto& targetZone = arch.zone(blockerMove.toTrap.zone);
    const bool paired = targetZone.kind == ZoneKind::Entanglement;
    TrapAddress aux;
    double bestDist = std::numeric_limits<double>::infinity();
    bool found = false;
    for (uint32_t r = 0; r < targetZone.rows; ++r) {
      for (uint32_t c = 0; c < targetZone.cols; ++c) {
        for (const Slot slot :
             paired ? std::vector<Slot>{Slot::PairLeft, Slot::PairRight}
                    : std::vector<Slot>{Slot::Single}) {
          const TrapAddress cand{blockerMove.toTrap.zone, r, c, slot};
          if (trapsInUse.contains(cand)) {
            continue;
          }
          const double d =
              norm(arch.trapPosition(cand) - blockerMove.to);
          if (d < bestDist) {
            bestDist = d;
            aux = cand;
            found = true;
          }
        }
      }
    }
    if (!found) {
      throw RoutingError("no auxiliary trap available to break a routing "
                         "cycle in zone " +
                         targetZone.id);
    }
    trapsInUse.insert(aux);
    const Vec2 auxPos = arch.trapPosition(aux);
    const Vec2 cur = positionOf[blocker];
    emitStep(detail::stepFromMoves(
        {{blocker, blockerMove.fromTrap, aux, cur, auxPos,
          norm(auxPos - cur)}}));
    rest.push_back({blocker, aux, blockerMove.toTrap, auxPos, blockerMove.to,
                    norm(blockerMove.to - auxPos)});
    pending = buildSteps(rest);
  }
  return route;
}

inline auto routeToJson(const Route& route) -> nlohmann::json {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : route.steps) {
    nlohmann::json sj;
    sj["max_dist_um"] = s.maxDist;
    nlohmann::json moves = nlohmann::json::array();
    for (const auto& m : s.movements) {
      moves.push_back({{"atom", m.atom},
                       {"from", {m.from.x, m.from.y}},
                       {"to", {m.to.x, m.to.y}},
                       {"dist_um", m.dist}});
    }
    sj["movements"] = std::move(moves);
    sj["pickup_batches"] = s.pickupBatches;
    sj["drop_batches"] = s.dropBatches;
    steps.push_back(std::move(sj));
  }
  return {{"steps", std::move(steps)}};
}

} // namespace zonec
