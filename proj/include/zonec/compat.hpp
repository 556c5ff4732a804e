#pragma once

#include "zonec/arch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace zonec {

/**
 * One atom movement expressed over two coordinate systems: the source in
 * discrete ranks among all moving atoms (see discretize), the target in the
 * grid coordinates of the target trap lattice. dist is the physical travel
 * distance in micrometers.
 */
struct Movement {
  uint32_t atom = 0;
  int32_t srcRow = 0; ///< rank of source y among moving atoms
  int32_t srcCol = 0; ///< rank of source x among moving atoms
  int32_t dstRow = 0; ///< target row in the target lattice
  int32_t dstCol = 0; ///< target column in the target lattice
  double dist = 0.0;

  friend auto operator==(const Movement&, const Movement&) -> bool = default;
};

/// Per-atom discrete source coordinates.
struct DiscreteSource {
  int32_t row = 0;
  int32_t col = 0;
};

/**
 * Dense ranks of the moving atoms' source coordinates: row is the rank of
 * the atom's y among the distinct y values of all movers (ascending), col
 * likewise for x. Atoms sharing a physical coordinate share the rank, which
 * lets the exact-match compatibility condition express the preservation
 * constraint.
 */
inline auto discretize(std::span<const std::pair<uint32_t, Vec2>> movers)
    -> std::unordered_map<uint32_t, DiscreteSource> {
  std::vector<double> ys;
  std::vector<double> xs;
  ys.reserve(movers.size());
  xs.reserve(movers.size());
  for (const auto& [atom, pos] : movers) {
    ys.push_back(pos.y);
    xs.push_back(pos.x);
  }
  auto dedupe = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(ys);
  dedupe(xs);
  std::unordered_map<uint32_t, DiscreteSource> out;
  out.reserve(movers.size());
  for (const auto& [atom, pos] : movers) {
    const auto r = std::lower_bound(ys.begin(), ys.end(), pos.y) - ys.begin();
    const auto c = std::lower_bound(xs.begin(), xs.end(), pos.x) - xs.begin();
    out.emplace(atom, DiscreteSource{static_cast<int32_t>(r),
                                     static_cast<int32_t>(c)});
  }
  return out;
}

/**
 * Strictly increasing key -> value mapping with exact lookup and
 * predecessor/successor queries, kept as a flat sorted vector so cloning a
 * search node stays a memcpy.
 */
class AxisMap {
public:
  struct Check {
    bool compatible = false;
    bool exists = false; ///< key already present with the same value
  };

  /// Condition (1): the key exists and maps to the same value. Condition
  /// (2): the key is absent and the value lies strictly between the
  /// neighbors' values (missing neighbors bound with +-infinity).
  [[nodiscard]] auto check(int32_t key, int32_t value) const -> Check {
    const auto it = std::lower_bound(
        entries_.begin(), entries_.end(), key,
        [](const auto& e, int32_t k) { return e.first < k; });
    if (it != entries_.end() && it->first == key) {
      return {it->second == value, true};
    }
    const bool aboveLower = it == entries_.begin() || std::prev(it)->second <
                                                          value;
    const bool belowUpper = it == entries_.end() || value < it->second;
    return {aboveLower && belowUpper, false};
  }

  void insert(int32_t key, int32_t value) {
    const auto it = std::lower_bound(
        entries_.begin(), entries_.end(), key,
        [](const auto& e, int32_t k) { return e.first < k; });
    if (it != entries_.end() && it->first == key) {
      return; // condition (1) hit, entry already present
    }
    entries_.insert(it, {key, value});
  }

  [[nodiscard]] auto entries() const
      -> const std::vector<std::pair<int32_t, int32_t>>& {
    return entries_;
  }
  [[nodiscard]] auto size() const -> size_t { return entries_.size(); }
  [[nodiscard]] auto empty() const -> bool { return entries_.empty(); }

  /// Population standard deviation of value - factor * key.
  [[nodiscard]] auto sdOfDifferences(double factor) const -> double {
    if (entries_.empty()) {
      return 0.0;
    }
    double mean = 0.0;
    for (const auto& [k, v] : entries_) {
      mean += static_cast<double>(v) - factor * static_cast<double>(k);
    }
    mean /= static_cast<double>(entries_.size());
    double var = 0.0;
    for (const auto& [k, v] : entries_) {
      const double d =
          static_cast<double>(v) - factor * static_cast<double>(k) - mean;
      var += d * d;
    }
    var /= static_cast<double>(entries_.size());
    return std::sqrt(var);
  }

private:
  std::vector<std::pair<int32_t, int32_t>> entries_;
};

/// Scaling factors applied to the keys before the standard deviation of the
/// key-value differences is taken, one per axis.
struct SdScale {
  double row = 1.0;
  double col = 1.0;
};

class MovementGroup {
public:
  /// A movement fits iff both its row and column mappings are individually
  /// compatible with the group's trees.
  [[nodiscard]] auto isCompatible(const Movement& m) const -> bool {
    return rowMap_.check(m.srcRow, m.dstRow).compatible &&
           colMap_.check(m.srcCol, m.dstCol).compatible;
  }

  /// Inserts without re-checking; callers go through GroupSet::insert.
  void add(const Movement& m, bool trackMembers) {
    rowMap_.insert(m.srcRow, m.dstRow);
    colMap_.insert(m.srcCol, m.dstCol);
    dMax_ = std::max(dMax_, m.dist);
    if (trackMembers) {
      members_.push_back(m);
    }
  }

  [[nodiscard]] auto dMax() const -> double { return dMax_; }
  [[nodiscard]] auto rowMap() const -> const AxisMap& { return rowMap_; }
  [[nodiscard]] auto colMap() const -> const AxisMap& { return colMap_; }
  [[nodiscard]] auto members() const -> const std::vector<Movement>& {
    return members_;
  }
  [[nodiscard]] auto empty() const -> bool {
    return rowMap_.empty() && colMap_.empty();
  }

  /// Population standard deviation of the key-value differences per axis,
  /// keys scaled first. (0, 0) for an empty group.
  [[nodiscard]] auto sd(const SdScale& scale) const
      -> std::pair<double, double> {
    return {rowMap_.sdOfDifferences(scale.row),
            colMap_.sdOfDifferences(scale.col)};
  }

private:
  AxisMap rowMap_;
  AxisMap colMap_;
  std::vector<Movement> members_;
  double dMax_ = 0.0;
};

/**
 * Ordered list of movement groups with first-fit insertion: a movement goes
 * into the first compatible group in creation order, or opens a new group.
 *
 * Member lists are optional; search nodes clone GroupSets on every
 * expansion and only need the mappings and the cached maxima.
 */
class GroupSet {
public:
  explicit GroupSet(bool trackMembers = true) : trackMembers_(trackMembers) {}

  /// Returns the index of the receiving group.
  auto insert(const Movement& m) -> size_t {
    for (size_t i = 0; i < groups_.size(); ++i) {
      if (groups_[i].isCompatible(m)) {
        groups_[i].add(m, trackMembers_);
        return i;
      }
    }
    groups_.emplace_back().add(m, trackMembers_);
    return groups_.size() - 1;
  }

  [[nodiscard]] auto size() const -> size_t { return groups_.size(); }
  [[nodiscard]] auto empty() const -> bool { return groups_.empty(); }
  [[nodiscard]] auto operator[](size_t i) const -> const MovementGroup& {
    return groups_[i];
  }
  [[nodiscard]] auto groups() const -> const std::vector<MovementGroup>& {
    return groups_;
  }

  [[nodiscard]] auto maxSqrtDmax() const -> double {
    double best = 0.0;
    for (const auto& g : groups_) {
      best = std::max(best, g.dMax());
    }
    return std::sqrt(best);
  }

  [[nodiscard]] auto sumSd(const SdScale& scale) const -> double {
    double total = 0.0;
    for (const auto& g : groups_) {
      const auto [sr, sc] = g.sd(scale);
      total += sr + sc;
    }
    return total;
  }

private:
  std::vector<MovementGroup> groups_;
  bool trackMembers_;
};

inline auto groupSetToJson(const GroupSet& gs) -> nlohmann::json {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : gs.groups()) {
    nlohmann::json gj;
    gj["d_max"] = g.dMax();
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [k, v] : g.rowMap().entries()) {
      rows.push_back({k, v});
    }
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& [k, v] : g.colMap().entries()) {
      cols.push_back({k, v});
    }
    gj["row_map"] = std::move(rows);
    gj["col_map"] = std::move(cols);
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& m : g.members()) {
      atoms.push_back(m.atom);
    }
    gj["atoms"] = std::move(atoms);
    out.push_back(std::move(gj));
  }
  return out;
}

} // namespace zonec
