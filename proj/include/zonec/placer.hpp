#pragma once

#include "zonec/arch.hpp"
#include "zonec/compat.hpp"
#include "zonec/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace zonec {

/// Search and cost parameters. The two presets follow the tuning for the
/// small-benchmark and large-circuit regimes.
struct PlacerParams {
  double alpha = 0.2; ///< look-ahead weight
  double beta = 0.2;  ///< depth-priority constant in the accelerating part
  double gamma = 5.0; ///< reuse bonus subtracted from the reuse cost
  double delta = 0.6; ///< weight of the accelerating part
  Window window{7, 7};
  size_t maxNodes = 1'000'000; ///< node-expansion budget per layer

  static auto qasmbenchProfile() -> PlacerParams {
    return {0.2, 0.2, 5.0, 0.6, Window{7, 7}, 1'000'000};
  }
  static auto largeProfile() -> PlacerParams {
    return {0.2, 0.8, 5.0, 0.9, Window{7, 7}, 1'000'000};
  }
};

enum class PlacementKind : uint8_t { Initial, Gate, Intermediate };

/// Total injective map atom -> trap for one snapshot of the machine.
struct Placement {
  std::vector<TrapAddress> assignment; ///< indexed by atom id
  PlacementKind kind = PlacementKind::Initial;
  std::unordered_set<uint32_t> reused; ///< atoms left in the entanglement zone

  [[nodiscard]] auto numAtoms() const -> size_t { return assignment.size(); }
};

struct PlaceResult {
  Placement placement;
  bool budgetExhausted = false; ///< search stopped on the node budget
  bool fellBack = false;        ///< no goal found, baseline result returned
  double cost = 0.0;            ///< goal cost, clamped at 0 for reporting
};

struct PlacerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What the look-ahead terms see of the upcoming two-qubit layer.
struct NextLayerInfo {
  std::vector<Gate> gates;                 ///< next layer's cz gates
  std::unordered_set<uint32_t> reuseMarks; ///< marks into that layer

  [[nodiscard]] auto partnerOf(uint32_t atom) const
      -> std::optional<uint32_t> {
    for (const auto& g : gates) {
      if (g.qubits[0] == atom) {
        return g.qubits[1];
      }
      if (g.qubits[1] == atom) {
        return g.qubits[0];
      }
    }
    return std::nullopt;
  }
  [[nodiscard]] auto marked(uint32_t atom) const -> bool {
    return reuseMarks.contains(atom);
  }
};

/// Eq-style placement cost: sum over groups of sqrt(d_max).
inline auto cost(const GroupSet& groups) -> double {
  double total = 0.0;
  for (const auto& g : groups.groups()) {
    total += std::sqrt(g.dMax());
  }
  return total;
}

namespace detail {

/// Site identity that ignores the pair slot: one gate consumes one site.
inline auto siteKey(const TrapAddress& a) -> uint64_t {
  return (static_cast<uint64_t>(a.zone) << 48) |
         (static_cast<uint64_t>(a.row) << 24) | static_cast<uint64_t>(a.col);
}

inline auto sortedContains(const std::vector<uint64_t>& v, uint64_t key)
    -> bool {
  return std::binary_search(v.begin(), v.end(), key);
}

inline void sortedInsert(std::vector<uint64_t>& v, uint64_t key) {
  v.insert(std::upper_bound(v.begin(), v.end(), key), key);
}

} // namespace detail

/// One candidate assignment for a job: a pair site with a fixed orientation
/// for gate jobs, a storage trap or the reuse option for atom jobs.
struct PlacementOption {
  std::array<TrapAddress, 2> traps{};
  std::array<Movement, 2> movements{};
  uint8_t numMovements = 0;
  bool reuse = false;
  double maxDist = 0.0;   ///< max travel distance over the option's movements
  double lookahead = 0.0; ///< raw cost_l, or cost_r for the reuse option
  double weightedLookahead = 0.0; ///< alpha * cost_l, or cost_r unweighted
  uint64_t siteKey = 0;
};

/// One gate or atom to place, with its pruned option list sorted by
/// ascending maxDist so the first unconsumed option is the nearest one.
struct PlacementJob {
  std::array<uint32_t, 2> atoms{};
  uint8_t numAtoms = 1;
  std::vector<PlacementOption> options;
  double meanOptionLookahead = 0.0;
};

/// Node of the placement search tree. Each node extends its parent by one
/// placed job; jobs[depth] is the next job to place.
struct SearchNode {
  GroupSet groups{/*trackMembers=*/false};
  std::vector<uint64_t> consumed; ///< sorted site keys taken so far
  double reuseCostSum = 0.0;      ///< sum of cost_r over placed reused atoms
  double lookaheadSum = 0.0;      ///< sum of raw cost_l over placed items
  uint32_t depth = 0;
  uint32_t option = 0;
  const SearchNode* parent = nullptr;
};

/// Accumulated cost of a (partial) placement: group cost plus the reuse
/// costs at full weight plus the look-ahead costs scaled by alpha.
inline auto totalCost(const SearchNode& node, const PlacerParams& params)
    -> double {
  return cost(node.groups) + node.reuseCostSum +
         params.alpha * node.lookaheadSum;
}

/// Lower bound on the cost increase until all jobs are placed: the sqrt of
/// the largest distance any unplaced job must still travel to its nearest
/// free option, reduced by the largest sqrt(d_max) an existing group already
/// pays, clamped at zero.
inline auto heuristicAdmissible(const SearchNode& node,
                                std::span<const PlacementJob> jobs) -> double {
  double maxUnplaced = 0.0;
  for (size_t i = node.depth; i < jobs.size(); ++i) {
    // options are sorted by distance, so the first unconsumed one is the
    // nearest free option (the reuse option has distance 0)
    for (const auto& opt : jobs[i].options) {
      if (!detail::sortedContains(node.consumed, opt.siteKey)) {
        maxUnplaced = std::max(maxUnplaced, opt.maxDist);
        break;
      }
    }
  }
  const double diff = std::sqrt(maxUnplaced) - node.groups.maxSqrtDmax();
  return std::max(0.0, diff);
}

/// Admissible part plus the conflict estimate: groups whose key-value
/// differences spread out are harder to extend, and more so the more jobs
/// remain.
inline auto heuristicAccelerating(const SearchNode& node,
                                  std::span<const PlacementJob> jobs,
                                  const PlacerParams& params,
                                  const SdScale& scale) -> double {
  const auto unplaced = static_cast<double>(jobs.size() - node.depth);
  return heuristicAdmissible(node, jobs) +
         params.delta * (params.beta + node.groups.sumSd(scale)) * unplaced;
}

/// Full heuristic: adds every unplaced job's mean option look-ahead so the
/// look-ahead share of the real cost stays balanced by the estimate.
inline auto heuristicFull(const SearchNode& node,
                          std::span<const PlacementJob> jobs,
                          const PlacerParams& params, const SdScale& scale)
    -> double {
  double lookahead = 0.0;
  for (size_t i = node.depth; i < jobs.size(); ++i) {
    lookahead += jobs[i].meanOptionLookahead;
  }
  return heuristicAccelerating(node, jobs, params, scale) + lookahead;
}

/// Look-ahead cost of placing `gate` with its atoms on trapA/trapB: if one
/// operand is marked for reuse into the next layer, the cost of moving its
/// next partner from where it sits now to the trap adjacent to the marked
/// atom; 0 otherwise.
inline auto lookaheadCostGate(const Gate& gate, const TrapAddress& trapA,
                              const TrapAddress& trapB,
                              const NextLayerInfo& next,
                              const Placement& prev, const Architecture& arch)
    -> double {
  for (size_t i = 0; i < 2; ++i) {
    const uint32_t atom = gate.qubits[i];
    if (!next.marked(atom)) {
      continue;
    }
    const auto partner = next.partnerOf(atom);
    if (!partner) {
      continue;
    }
    const TrapAddress& own = i == 0 ? trapA : trapB;
    const Vec2 adjacent = arch.trapPosition(Architecture::otherSlot(own));
    const Vec2 partnerPos = arch.trapPosition(prev.assignment[*partner]);
    return std::sqrt(norm(partnerPos - adjacent));
  }
  return 0.0;
}

/// Look-ahead cost of an intermediate option for `atom`. The reuse option
/// (storageTrap empty) keeps the atom at its entanglement trap and charges
/// the partner's move to the adjacent trap minus the gamma bonus, possibly
/// negative. A storage option charges the partner's move to the candidate
/// trap, or 0 when no next-layer gate acts on the atom.
inline auto lookaheadCostAtom(uint32_t atom,
                              const std::optional<TrapAddress>& storageTrap,
                              const NextLayerInfo& next, const Placement& prev,
                              const Architecture& arch, double gamma)
    -> double {
  const auto partner = next.partnerOf(atom);
  if (!storageTrap.has_value()) {
    if (!next.marked(atom) || !partner) {
      throw PlacerError("reuse option requested for an unmarked atom " +
                        std::to_string(atom));
    }
    const Vec2 adjacent = arch.trapPosition(
        Architecture::otherSlot(prev.assignment[atom]));
    const Vec2 partnerPos = arch.trapPosition(prev.assignment[*partner]);
    return std::sqrt(norm(partnerPos - adjacent)) - gamma;
  }
  if (!partner) {
    return 0.0;
  }
  const Vec2 trapPos = arch.trapPosition(*storageTrap);
  const Vec2 partnerPos = arch.trapPosition(prev.assignment[*partner]);
  return std::sqrt(norm(partnerPos - trapPos));
}

namespace detail {

struct SearchOutcome {
  const SearchNode* goal = nullptr;
  bool exhausted = false;
};

/**
 * Best-first tree search over the job sequence. Nodes are expanded in order
 * of g + h with ties broken towards deeper nodes, then insertion order. The
 * goal test runs at expansion, so with the admissible heuristic alone the
 * first goal popped is optimal. On budget exhaustion the cheapest goal seen
 * so far is returned if any.
 */
inline auto runSearch(std::span<const PlacementJob> jobs,
                      const GroupSet& seededGroups,
                      const PlacerParams& params, const SdScale& scale,
                      std::deque<SearchNode>& nodes) -> SearchOutcome {
  struct Entry {
    double f;
    uint32_t depth;
    uint64_t seq;
    const SearchNode* node;
  };
  struct EntryCompare {
    auto operator()(const Entry& a, const Entry& b) const -> bool {
      if (a.f != b.f) {
        return a.f > b.f;
      }
      if (a.depth != b.depth) {
        return a.depth < b.depth; // deeper first
      }
      return a.seq > b.seq; // FIFO
    }
  };

  nodes.clear();
  SearchNode& root = nodes.emplace_back();
  root.groups = seededGroups;
  uint64_t seq = 0;
  std::priority_queue<Entry, std::vector<Entry>, EntryCompare> open;
  open.push({totalCost(root, params) + heuristicFull(root, jobs, params, scale),
             0, seq++, &root});

  const SearchNode* bestGoal = nullptr;
  double bestGoalCost = 0.0;
  size_t expansions = 0;
  // creation cap keeps a runaway frontier bounded independently of the
  // expansion budget
  const size_t maxCreated =
      params.maxNodes > (std::numeric_limits<size_t>::max() / 16)
          ? std::numeric_limits<size_t>::max()
          : params.maxNodes * 16;

  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    const SearchNode& node = *top.node;
    if (node.depth == jobs.size()) {
      return {&node, false};
    }
    if (expansions >= params.maxNodes || nodes.size() >= maxCreated) {
      return {bestGoal, true};
    }
    ++expansions;
    const PlacementJob& job = jobs[node.depth];
    for (uint32_t i = 0; i < job.options.size(); ++i) {
      const PlacementOption& opt = job.options[i];
      if (sortedContains(node.consumed, opt.siteKey)) {
        continue;
      }
      SearchNode& child = nodes.emplace_back(node);
      child.parent = &node;
      child.depth = node.depth + 1;
      child.option = i;
      // the reuse option consumes its own pair site, which keeps two atoms
      // parked on one site from both staying for the next layer
      sortedInsert(child.consumed, opt.siteKey);
      if (!opt.reuse) {
        for (uint8_t m = 0; m < opt.numMovements; ++m) {
          child.groups.insert(opt.movements[m]);
        }
        child.lookaheadSum += opt.lookahead;
      } else {
        child.reuseCostSum += opt.lookahead;
      }
      const double g = totalCost(child, params);
      const double h = heuristicFull(child, jobs, params, scale);
      if (child.depth == jobs.size() &&
          (bestGoal == nullptr || g < bestGoalCost)) {
        bestGoal = &child;
        bestGoalCost = g;
      }
      open.push({g + h, child.depth, seq++, &child});
    }
  }
  return {bestGoal, bestGoal == nullptr};
}

/// Walks parent pointers and returns the option index chosen per depth.
inline auto extractChoices(const SearchNode& goal) -> std::vector<uint32_t> {
  std::vector<uint32_t> choices(goal.depth);
  for (const SearchNode* n = &goal; n->parent != nullptr; n = n->parent) {
    choices[n->depth - 1] = n->option;
  }
  return choices;
}

inline auto isInZoneKind(const Architecture& arch, const TrapAddress& a,
                         ZoneKind kind) -> bool {
  return arch.zone(a.zone).kind == kind;
}

/// Picks the zone of the requested kind whose nearest site is closest to
/// `around` (ties by zone index).
inline auto nearestZoneOfKind(const Architecture& arch, const Vec2& around,
                              ZoneKind kind) -> uint32_t {
  uint32_t best = std::numeric_limits<uint32_t>::max();
  double bestDist = std::numeric_limits<double>::infinity();
  for (const uint32_t z : arch.zonesOfKind(kind)) {
    const auto site = arch.nearestSite(around, z);
    const double d =
        norm(arch.sitePosition(site.zone, site.row, site.col) - around);
    if (d < bestDist) {
      bestDist = d;
      best = z;
    }
  }
  if (best == std::numeric_limits<uint32_t>::max()) {
    throw PlacerError("architecture has no zone of the requested kind");
  }
  return best;
}

inline auto sdScaleFor(const Architecture& arch, ZoneKind targetKind,
                       size_t distinctSrcRows, size_t distinctSrcCols)
    -> SdScale {
  return {static_cast<double>(arch.gridRowExtent(targetKind)) /
              static_cast<double>(std::max<size_t>(1, distinctSrcRows)),
          static_cast<double>(arch.gridColExtent(targetKind)) /
              static_cast<double>(std::max<size_t>(1, distinctSrcCols))};
}

inline auto makeMovement(const Architecture& arch, uint32_t atom,
                         const DiscreteSource& src, const Vec2& srcPos,
                         const TrapAddress& target) -> Movement {
  const Vec2 dstPos = arch.trapPosition(target);
  return {atom,
          src.row,
          src.col,
          arch.gridRow(target),
          arch.gridCol(target),
          norm(dstPos - srcPos)};
}

} // namespace detail

/// Deterministic row-major fill of the storage zones, starting with the row
/// closest to the (first) entanglement zone.
inline auto placeInitial(size_t atomCount, const Architecture& arch)
    -> Placement {
  if (atomCount > arch.storageCapacity()) {
    throw CapacityError("storage capacity " +
                        std::to_string(arch.storageCapacity()) +
                        " is too small for " + std::to_string(atomCount) +
                        " atoms");
  }
  const auto entZones = arch.zonesOfKind(ZoneKind::Entanglement);
  const double entY = arch.zone(entZones.front()).origin.y;

  Placement placement;
  placement.kind = PlacementKind::Initial;
  placement.assignment.reserve(atomCount);
  uint32_t atom = 0;
  for (const uint32_t zi : arch.zonesOfKind(ZoneKind::Storage)) {
    const auto& z = arch.zone(zi);
    const double firstRowDist = std::abs(z.origin.y - entY);
    const double lastRowDist = std::abs(
        z.origin.y + static_cast<double>(z.rows - 1) * z.rowPitch - entY);
    const bool forward = firstRowDist <= lastRowDist;
    for (size_t i = 0; i < z.rows && atom < atomCount; ++i) {
      const auto row =
          static_cast<uint32_t>(forward ? i : z.rows - 1 - i);
      for (uint32_t col = 0; col < z.cols && atom < atomCount; ++col) {
        placement.assignment.push_back({zi, row, col, Slot::Single});
        ++atom;
      }
    }
    if (atom == atomCount) {
      break;
    }
  }
  return placement;
}

namespace detail {

/// Shared forced-placement handling: a gate whose operand stayed in the
/// entanglement zone is pinned, its partner goes to the adjacent trap. Only
/// gates with both atoms free to move are left for the search.
struct GateLayerSetup {
  Placement placement; ///< prev plus forced placements applied
  std::vector<Gate> searchGates;
  std::vector<std::pair<uint32_t, TrapAddress>> forcedMoves;
  TrapSet occupiedEnt;
};

inline auto prepareGateLayer(const Placement& prev, const Layer& layer,
                             const std::unordered_set<uint32_t>& reuseIn,
                             const Architecture& arch) -> GateLayerSetup {
  GateLayerSetup setup;
  setup.placement = prev;
  setup.placement.kind = PlacementKind::Gate;
  setup.placement.reused = reuseIn;
  for (uint32_t atom = 0; atom < prev.numAtoms(); ++atom) {
    if (isInZoneKind(arch, prev.assignment[atom], ZoneKind::Entanglement)) {
      setup.occupiedEnt.insert(prev.assignment[atom]);
    }
  }
  for (const auto& gate : layer.gates) {
    const uint32_t a = gate.qubits[0];
    const uint32_t b = gate.qubits[1];
    const bool aPinned =
        reuseIn.contains(a) &&
        isInZoneKind(arch, prev.assignment[a], ZoneKind::Entanglement);
    const bool bPinned =
        reuseIn.contains(b) &&
        isInZoneKind(arch, prev.assignment[b], ZoneKind::Entanglement);
    if (!aPinned && !bPinned) {
      setup.searchGates.push_back(gate);
      continue;
    }
    const uint32_t pinned = aPinned ? a : b;
    const uint32_t mover = aPinned ? b : a;
    const TrapAddress target =
        Architecture::otherSlot(prev.assignment[pinned]);
    if (!(setup.placement.assignment[mover] == target)) {
      setup.placement.assignment[mover] = target;
      setup.forcedMoves.emplace_back(mover, target);
    }
    setup.occupiedEnt.insert(target);
    setup.occupiedEnt.insert(prev.assignment[pinned]);
  }
  return setup;
}

inline void checkGatePlacement(const Placement& placement, const Layer& layer,
                               const Architecture& arch) {
  TrapSet seen;
  for (const auto& trap : placement.assignment) {
    if (!seen.insert(trap).second) {
      throw PlacerError("placement assigns two atoms to one trap");
    }
  }
  for (const auto& gate : layer.gates) {
    const auto& ta = placement.assignment[gate.qubits[0]];
    const auto& tb = placement.assignment[gate.qubits[1]];
    const bool paired = ta.zone == tb.zone && ta.row == tb.row &&
                        ta.col == tb.col && ta.slot != tb.slot &&
                        ta.slot != Slot::Single && tb.slot != Slot::Single;
    if (!paired || !isInZoneKind(arch, ta, ZoneKind::Entanglement)) {
      throw PlacerError("gate atoms are not on one entanglement pair");
    }
  }
}

} // namespace detail

/// Greedy routing-agnostic gate placement: gates in layer order, each to the
/// free pair site minimizing the accumulated travel distance of its two
/// atoms (ties: max distance, then site, then orientation).
inline auto placeBaselineGateLayer(const Placement& prev, const Layer& layer,
                                   const std::unordered_set<uint32_t>& reuseIn,
                                   const Architecture& arch) -> Placement {
  auto setup = detail::prepareGateLayer(prev, layer, reuseIn, arch);
  for (const auto& gate : setup.searchGates) {
    const uint32_t a = gate.qubits[0];
    const uint32_t b = gate.qubits[1];
    const Vec2 posA = arch.trapPosition(prev.assignment[a]);
    const Vec2 posB = arch.trapPosition(prev.assignment[b]);
    double bestSum = std::numeric_limits<double>::infinity();
    double bestMax = 0.0;
    TrapAddress bestA;
    TrapAddress bestB;
    bool found = false;
    for (const uint32_t zi : arch.zonesOfKind(ZoneKind::Entanglement)) {
      const auto& z = arch.zone(zi);
      for (uint32_t r = 0; r < z.rows; ++r) {
        for (uint32_t c = 0; c < z.cols; ++c) {
          const TrapAddress left{zi, r, c, Slot::PairLeft};
          const TrapAddress right{zi, r, c, Slot::PairRight};
          if (setup.occupiedEnt.contains(left) ||
              setup.occupiedEnt.contains(right)) {
            continue;
          }
          const double dAL = norm(arch.trapPosition(left) - posA);
          const double dBR = norm(arch.trapPosition(right) - posB);
          const double dAR = norm(arch.trapPosition(right) - posA);
          const double dBL = norm(arch.trapPosition(left) - posB);
          const std::array<std::tuple<double, double, TrapAddress,
                                      TrapAddress>,
                           2>
              orients{{{dAL + dBR, std::max(dAL, dBR), left, right},
                       {dAR + dBL, std::max(dAR, dBL), right, left}}};
          for (const auto& [sum, mx, trapA, trapB] : orients) {
            if (sum < bestSum || (sum == bestSum && mx < bestMax)) {
              bestSum = sum;
              bestMax = mx;
              bestA = trapA;
              bestB = trapB;
              found = true;
            }
          }
        }
      }
    }
    if (!found) {
      throw CapacityError("no free entanglement site for gate");
    }
    setup.placement.assignment[a] = bestA;
    setup.placement.assignment[b] = bestB;
    setup.occupiedEnt.insert(bestA);
    setup.occupiedEnt.insert(bestB);
  }
  detail::checkGatePlacement(setup.placement, layer, arch);
  return setup.placement;
}

/// Greedy routing-agnostic return to storage: atoms in id order, reuse taken
/// whenever marked, otherwise the nearest free storage trap.
inline auto
placeBaselineIntermediate(const Placement& prev,
                          const std::unordered_set<uint32_t>& reuseMarks,
                          const Architecture& arch) -> Placement {
  Placement placement = prev;
  placement.kind = PlacementKind::Intermediate;
  placement.reused.clear();
  TrapSet occupiedStorage;
  std::vector<uint32_t> movers;
  std::unordered_set<uint64_t> reusedSites;
  for (uint32_t atom = 0; atom < prev.numAtoms(); ++atom) {
    if (detail::isInZoneKind(arch, prev.assignment[atom], ZoneKind::Storage)) {
      occupiedStorage.insert(prev.assignment[atom]);
    } else if (reuseMarks.contains(atom) &&
               reusedSites.insert(detail::siteKey(prev.assignment[atom]))
                   .second) {
      // at most one atom per pair site may stay, its next partner needs
      // the adjacent trap
      placement.reused.insert(atom);
    } else {
      movers.push_back(atom);
    }
  }
  for (const uint32_t atom : movers) {
    const Vec2 pos = arch.trapPosition(prev.assignment[atom]);
    double bestDist = std::numeric_limits<double>::infinity();
    TrapAddress best;
    bool found = false;
    for (const uint32_t zi : arch.zonesOfKind(ZoneKind::Storage)) {
      const auto& z = arch.zone(zi);
      for (uint32_t r = 0; r < z.rows; ++r) {
        for (uint32_t c = 0; c < z.cols; ++c) {
          const TrapAddress trap{zi, r, c, Slot::Single};
          if (occupiedStorage.contains(trap)) {
            continue;
          }
          const double d = norm(arch.trapPosition(trap) - pos);
          if (d < bestDist) {
            bestDist = d;
            best = trap;
            found = true;
          }
        }
      }
    }
    if (!found) {
      throw CapacityError("no free storage trap for atom " +
                          std::to_string(atom));
    }
    placement.assignment[atom] = best;
    occupiedStorage.insert(best);
  }
  return placement;
}

/**
 * Routing-aware gate placement. Gates with a reused operand are pinned to
 * the reused atom's pair; the remaining gates are placed by a best-first
 * search over candidate pair sites (both orientations), hardest gate first.
 * The pinned partners' movements seed the search's group structure so every
 * candidate is costed against the moves the transition must make anyway.
 */
inline auto placeGateLayer(const Placement& prev, const Layer& layer,
                           const std::unordered_set<uint32_t>& reuseIn,
                           const NextLayerInfo& next, const Architecture& arch,
                           const PlacerParams& params) -> PlaceResult {
  auto setup = detail::prepareGateLayer(prev, layer, reuseIn, arch);
  if (setup.searchGates.empty()) {
    detail::checkGatePlacement(setup.placement, layer, arch);
    return {std::move(setup.placement), false, false, 0.0};
  }

  // discretize the sources of everything that moves in this transition
  std::vector<std::pair<uint32_t, Vec2>> movers;
  for (const auto& gate : setup.searchGates) {
    movers.emplace_back(gate.qubits[0],
                        arch.trapPosition(prev.assignment[gate.qubits[0]]));
    movers.emplace_back(gate.qubits[1],
                        arch.trapPosition(prev.assignment[gate.qubits[1]]));
  }
  for (const auto& [atom, target] : setup.forcedMoves) {
    movers.emplace_back(atom, arch.trapPosition(prev.assignment[atom]));
  }
  const auto srcOf = discretize(movers);
  size_t distinctRows = 0;
  size_t distinctCols = 0;
  for (const auto& [atom, src] : srcOf) {
    distinctRows = std::max(distinctRows, static_cast<size_t>(src.row) + 1);
    distinctCols = std::max(distinctCols, static_cast<size_t>(src.col) + 1);
  }

  GroupSet seed{/*trackMembers=*/false};
  {
    std::vector<Movement> forced;
    for (const auto& [atom, target] : setup.forcedMoves) {
      forced.push_back(detail::makeMovement(
          arch, atom, srcOf.at(atom),
          arch.trapPosition(prev.assignment[atom]), target));
    }
    std::sort(forced.begin(), forced.end(),
              [](const Movement& a, const Movement& b) {
                return std::tie(b.dist, a.atom) < std::tie(a.dist, b.atom);
              });
    for (const auto& m : forced) {
      seed.insert(m);
    }
  }

  std::vector<PlacementJob> jobs;
  jobs.reserve(setup.searchGates.size());
  for (const auto& gate : setup.searchGates) {
    const uint32_t a = gate.qubits[0];
    const uint32_t b = gate.qubits[1];
    const Vec2 posA = arch.trapPosition(prev.assignment[a]);
    const Vec2 posB = arch.trapPosition(prev.assignment[b]);
    const Vec2 mid{(posA.x + posB.x) / 2.0, (posA.y + posB.y) / 2.0};
    const uint32_t zi =
        detail::nearestZoneOfKind(arch, mid, ZoneKind::Entanglement);
    const auto sites = arch.candidateTraps(mid, zi, setup.occupiedEnt,
                                           params.window,
                                           setup.searchGates.size());
    PlacementJob job;
    job.atoms = {a, b};
    job.numAtoms = 2;
    job.options.reserve(sites.size() * 2);
    for (const auto& site : sites) {
      const TrapAddress left = site; // candidateTraps hands out PairLeft
      const TrapAddress right = Architecture::otherSlot(site);
      for (const int orient : {0, 1}) {
        PlacementOption opt;
        opt.traps = orient == 0 ? std::array{left, right}
                                : std::array{right, left};
        opt.movements[0] = detail::makeMovement(arch, a, srcOf.at(a), posA,
                                                opt.traps[0]);
        opt.movements[1] = detail::makeMovement(arch, b, srcOf.at(b), posB,
                                                opt.traps[1]);
        opt.numMovements = 2;
        opt.maxDist = std::max(opt.movements[0].dist, opt.movements[1].dist);
        opt.lookahead = lookaheadCostGate(gate, opt.traps[0], opt.traps[1],
                                          next, prev, arch);
        opt.weightedLookahead = params.alpha * opt.lookahead;
        opt.siteKey = detail::siteKey(site);
        job.options.push_back(opt);
      }
    }
    std::sort(job.options.begin(), job.options.end(),
              [](const PlacementOption& x, const PlacementOption& y) {
                return std::tie(x.maxDist, x.siteKey, x.traps[0].slot) <
                       std::tie(y.maxDist, y.siteKey, y.traps[0].slot);
              });
    double sum = 0.0;
    for (const auto& opt : job.options) {
      sum += opt.weightedLookahead;
    }
    job.meanOptionLookahead =
        job.options.empty() ? 0.0
                            : sum / static_cast<double>(job.options.size());
    jobs.push_back(std::move(job));
  }
  // hardest first: descending nearest-option travel distance
  std::stable_sort(jobs.begin(), jobs.end(),
                   [](const PlacementJob& x, const PlacementJob& y) {
                     return x.options.front().maxDist >
                            y.options.front().maxDist;
                   });

  const SdScale scale = detail::sdScaleFor(arch, ZoneKind::Entanglement,
                                           distinctRows, distinctCols);
  std::deque<SearchNode> nodes;
  const auto outcome = detail::runSearch(jobs, seed, params, scale, nodes);
  if (outcome.goal == nullptr) {
    Placement fallback = placeBaselineGateLayer(prev, layer, reuseIn, arch);
    return {std::move(fallback), outcome.exhausted, true, 0.0};
  }
  const auto choices = detail::extractChoices(*outcome.goal);
  for (size_t i = 0; i < jobs.size(); ++i) {
    const auto& opt = jobs[i].options[choices[i]];
    setup.placement.assignment[jobs[i].atoms[0]] = opt.traps[0];
    setup.placement.assignment[jobs[i].atoms[1]] = opt.traps[1];
  }
  detail::checkGatePlacement(setup.placement, layer, arch);
  return {std::move(setup.placement), outcome.exhausted, false,
          std::max(0.0, totalCost(*outcome.goal, params))};
}

/**
 * Routing-aware intermediate placement. Every atom sitting in the
 * entanglement zone is a job; reuse-marked atoms carry the extra option of
 * staying put, whose cost is the partner's anticipated move minus the gamma
 * bonus. Jobs run farthest-from-storage first.
 */
inline auto placeIntermediate(const Placement& prev, const NextLayerInfo& next,
                              const Architecture& arch,
                              const PlacerParams& params) -> PlaceResult {
  Placement base = prev;
  base.kind = PlacementKind::Intermediate;
  base.reused.clear();

  std::vector<uint32_t> entAtoms;
  TrapSet occupiedStorage;
  for (uint32_t atom = 0; atom < prev.numAtoms(); ++atom) {
    if (detail::isInZoneKind(arch, prev.assignment[atom],
                             ZoneKind::Entanglement)) {
      entAtoms.push_back(atom);
    } else {
      occupiedStorage.insert(prev.assignment[atom]);
    }
  }
  if (entAtoms.empty()) {
    return {std::move(base), false, false, 0.0};
  }

  std::vector<std::pair<uint32_t, Vec2>> movers;
  movers.reserve(entAtoms.size());
  for (const uint32_t atom : entAtoms) {
    movers.emplace_back(atom, arch.trapPosition(prev.assignment[atom]));
  }
  const auto srcOf = discretize(movers);
  size_t distinctRows = 0;
  size_t distinctCols = 0;
  for (const auto& [atom, src] : srcOf) {
    distinctRows = std::max(distinctRows, static_cast<size_t>(src.row) + 1);
    distinctCols = std::max(distinctCols, static_cast<size_t>(src.col) + 1);
  }

  std::vector<PlacementJob> jobs;
  jobs.reserve(entAtoms.size());
  for (const uint32_t atom : entAtoms) {
    const Vec2 pos = arch.trapPosition(prev.assignment[atom]);
    const uint32_t zi = detail::nearestZoneOfKind(arch, pos, ZoneKind::Storage);
    const auto traps = arch.candidateTraps(pos, zi, occupiedStorage,
                                           params.window, entAtoms.size());
    PlacementJob job;
    job.atoms = {atom, 0};
    job.numAtoms = 1;
    if (next.marked(atom)) {
      PlacementOption reuse;
      reuse.traps[0] = prev.assignment[atom];
      reuse.reuse = true;
      reuse.lookahead =
          lookaheadCostAtom(atom, std::nullopt, next, prev, arch,
                            params.gamma);
      reuse.weightedLookahead = reuse.lookahead;
      reuse.siteKey = detail::siteKey(prev.assignment[atom]);
      job.options.push_back(reuse);
    }
    for (const auto& trap : traps) {
      PlacementOption opt;
      opt.traps[0] = trap;
      opt.movements[0] =
          detail::makeMovement(arch, atom, srcOf.at(atom), pos, trap);
      opt.numMovements = 1;
      opt.maxDist = opt.movements[0].dist;
      opt.lookahead =
          lookaheadCostAtom(atom, trap, next, prev, arch, params.gamma);
      opt.weightedLookahead = params.alpha * opt.lookahead;
      opt.siteKey = detail::siteKey(trap);
      job.options.push_back(opt);
    }
    std::sort(job.options.begin(), job.options.end(),
              [](const PlacementOption& x, const PlacementOption& y) {
                return std::tie(x.maxDist, y.reuse, x.siteKey) <
                       std::tie(y.maxDist, x.reuse, y.siteKey);
              });
    double sum = 0.0;
    for (const auto& opt : job.options) {
      sum += opt.weightedLookahead;
    }
    job.meanOptionLookahead =
        job.options.empty() ? 0.0
                            : sum / static_cast<double>(job.options.size());
    jobs.push_back(std::move(job));
  }
  // farthest from its nearest storage trap first
  auto storageDist = [](const PlacementJob& j) {
    for (const auto& opt : j.options) {
      if (!opt.reuse) {
        return opt.maxDist;
      }
    }
    return 0.0;
  };
  std::stable_sort(jobs.begin(), jobs.end(),
                   [&](const PlacementJob& x, const PlacementJob& y) {
                     return storageDist(x) > storageDist(y);
                   });

  const SdScale scale = detail::sdScaleFor(arch, ZoneKind::Storage,
                                           distinctRows, distinctCols);
  std::deque<SearchNode> nodes;
  const auto outcome =
      detail::runSearch(jobs, GroupSet{false}, params, scale, nodes);
  if (outcome.goal == nullptr) {
    Placement fallback =
        placeBaselineIntermediate(prev, next.reuseMarks, arch);
    return {std::move(fallback), outcome.exhausted, true, 0.0};
  }
  const auto choices = detail::extractChoices(*outcome.goal);
  for (size_t i = 0; i < jobs.size(); ++i) {
    const auto& opt = jobs[i].options[choices[i]];
    if (opt.reuse) {
      base.reused.insert(jobs[i].atoms[0]);
    } else {
      base.assignment[jobs[i].atoms[0]] = opt.traps[0];
    }
  }
  return {std::move(base), outcome.exhausted, false,
          std::max(0.0, totalCost(*outcome.goal, params))};
}

} // namespace zonec
