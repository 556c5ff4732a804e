#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace zonec {

/// 2D position in micrometers.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend auto operator+(const Vec2& a, const Vec2& b) -> Vec2 {
    return {a.x + b.x, a.y + b.y};
  }
  friend auto operator-(const Vec2& a, const Vec2& b) -> Vec2 {
    return {a.x - b.x, a.y - b.y};
  }
  friend auto operator==(const Vec2& a, const Vec2& b) -> bool = default;
};

inline auto norm(const Vec2& v) -> double { return std::hypot(v.x, v.y); }

enum class ZoneKind : uint8_t { Storage, Entanglement };

enum class Slot : uint8_t { Single, PairLeft, PairRight };

/**
 * One axis-aligned grid of static traps. Entanglement zones host a pair of
 * traps per (row, col) site, separated by pairOffset along the x axis and
 * centered on the site position.
 */
struct Zone {
  std::string id;
  ZoneKind kind = ZoneKind::Storage;
  Vec2 origin;
  size_t rows = 0;
  size_t cols = 0;
  double rowPitch = 0.0;
  double colPitch = 0.0;
  double pairOffset = 0.0; ///< intra-pair trap separation, entanglement only
};

/// Address of a single trap. In entanglement zones, slot selects the trap
/// within the pair; candidate queries use PairLeft as the site handle.
struct TrapAddress {
  uint32_t zone = 0;
  uint32_t row = 0;
  uint32_t col = 0;
  Slot slot = Slot::Single;

  friend auto operator==(const TrapAddress&, const TrapAddress&)
      -> bool = default;
  friend auto operator<(const TrapAddress& a, const TrapAddress& b) -> bool {
    return std::tie(a.zone, a.row, a.col, a.slot) <
           std::tie(b.zone, b.row, b.col, b.slot);
  }
};

struct TrapAddressHash {
  auto operator()(const TrapAddress& a) const -> size_t {
    uint64_t h = (static_cast<uint64_t>(a.zone) << 48) ^
                 (static_cast<uint64_t>(a.row) << 28) ^
                 (static_cast<uint64_t>(a.col) << 8) ^
                 static_cast<uint64_t>(a.slot);
    return std::hash<uint64_t>{}(h);
  }
};

using TrapSet = std::unordered_set<TrapAddress, TrapAddressHash>;

/// Pruning window extents (total rows x cols, centered on the nearest trap;
/// even extents round outward by half on each side).
struct Window {
  size_t rows = 7;
  size_t cols = 7;
};

struct ArchitectureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/**
 * Immutable model of the zoned trap layout plus the physical constants of
 * the motion model. Loaded once, shared read-only afterwards.
 */
class Architecture {
public:
  Architecture(std::vector<Zone> zones, double accelerationMps2,
               double trapTransferTimeUs, double interactionRadiusUm,
               Window window)
      : zones_(std::move(zones)), acceleration_(accelerationMps2),
        trapTransferTimeUs_(trapTransferTimeUs),
        interactionRadius_(interactionRadiusUm), window_(window) {
    validate();
    buildGridIndex();
  }

  /// Parses and validates the JSON architecture document.
  static auto fromJson(const std::string& text) -> Architecture;
  static auto fromJsonValue(const nlohmann::json& j) -> Architecture;

  [[nodiscard]] auto zones() const -> const std::vector<Zone>& {
    return zones_;
  }
  [[nodiscard]] auto zone(uint32_t idx) const -> const Zone& {
    if (idx >= zones_.size()) {
      throw ArchitectureError("zone index out of range");
    }
    return zones_[idx];
  }
  [[nodiscard]] auto zoneIndex(const std::string& id) const -> uint32_t {
    for (uint32_t i = 0; i < zones_.size(); ++i) {
      if (zones_[i].id == id) {
        return i;
      }
    }
    throw ArchitectureError("unknown zone id: " + id);
  }
  [[nodiscard]] auto accelerationMps2() const -> double {
    return acceleration_;
  }
  [[nodiscard]] auto trapTransferTimeUs() const -> double {
    return trapTransferTimeUs_;
  }
  [[nodiscard]] auto interactionRadiusUm() const -> double {
    return interactionRadius_;
  }
  [[nodiscard]] auto window() const -> Window { return window_; }

  [[nodiscard]] auto zonesOfKind(ZoneKind kind) const -> std::vector<uint32_t> {
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < zones_.size(); ++i) {
      if (zones_[i].kind == kind) {
        out.push_back(i);
      }
    }
    return out;
  }

  /// Center of a (row, col) site: pair midpoint in entanglement zones, the
  /// trap itself in storage zones.
  [[nodiscard]] auto sitePosition(uint32_t zoneIdx, uint32_t row,
                                  uint32_t col) const -> Vec2 {
    const auto& z = zone(zoneIdx);
    if (row >= z.rows || col >= z.cols) {
      throw ArchitectureError("site (" + std::to_string(row) + ", " +
                              std::to_string(col) + ") out of range in zone " +
                              z.id);
    }
    return {z.origin.x + static_cast<double>(col) * z.colPitch,
            z.origin.y + static_cast<double>(row) * z.rowPitch};
  }

  [[nodiscard]] auto trapPosition(const TrapAddress& addr) const -> Vec2 {
    const auto& z = zone(addr.zone);
    checkAddress(addr, z);
    Vec2 pos = sitePosition(addr.zone, addr.row, addr.col);
    if (addr.slot == Slot::PairLeft) {
      pos.x -= z.pairOffset / 2.0;
    } else if (addr.slot == Slot::PairRight) {
      pos.x += z.pairOffset / 2.0;
    }
    return pos;
  }

  [[nodiscard]] auto distance(const TrapAddress& a, const TrapAddress& b) const
      -> double {
    return norm(trapPosition(a) - trapPosition(b));
  }

  /**
   * All free sites of the zone inside a window centered on the site nearest
   * to `around`. A site in an entanglement zone is free iff neither slot of
   * its pair is occupied. If fewer than minFree free sites are found, the
   * window grows by one row and one column until the minimum is met or the
   * window covers the zone. Result is sorted by ascending distance of the
   * site center to `around`, ties by (row, col).
   *
   * Returned addresses use slot Single for storage zones and PairLeft as the
   * site handle for entanglement zones.
   */
  [[nodiscard]] auto candidateTraps(const Vec2& around, uint32_t zoneIdx,
                                    const TrapSet& occupied, Window window,
                                    size_t minFree = 1) const
      -> std::vector<TrapAddress>;

  /// Site of this zone whose center is nearest to `around` (ties by row,
  /// then col).
  [[nodiscard]] auto nearestSite(const Vec2& around, uint32_t zoneIdx) const
      -> TrapAddress;

  /// The other trap of an entanglement pair.
  [[nodiscard]] static auto otherSlot(const TrapAddress& addr) -> TrapAddress {
    TrapAddress other = addr;
    other.slot =
        addr.slot == Slot::PairLeft ? Slot::PairRight : Slot::PairLeft;
    return other;
  }

  /// Grid coordinates of a trap within the union lattice of all zones of its
  /// kind: dense ranks of the distinct physical row/column coordinates.
  /// Order-consistent with physical positions across zones of one kind.
  [[nodiscard]] auto gridRow(const TrapAddress& addr) const -> int32_t;
  [[nodiscard]] auto gridCol(const TrapAddress& addr) const -> int32_t;
  /// Number of distinct rows/columns in the union lattice of a zone kind.
  [[nodiscard]] auto gridRowExtent(ZoneKind kind) const -> size_t {
    return kind == ZoneKind::Storage ? storageRowCoords_.size()
                                     : entRowCoords_.size();
  }
  [[nodiscard]] auto gridColExtent(ZoneKind kind) const -> size_t {
    return kind == ZoneKind::Storage ? storageColCoords_.size()
                                     : entColCoords_.size();
  }

  [[nodiscard]] auto storageCapacity() const -> size_t {
    size_t n = 0;
    for (const auto& z : zones_) {
      if (z.kind == ZoneKind::Storage) {
        n += z.rows * z.cols;
      }
    }
    return n;
  }

private:
  void validate() const;
  void buildGridIndex();

  static void checkAddress(const TrapAddress& addr, const Zone& z) {
    if (addr.row >= z.rows || addr.col >= z.cols) {
      throw ArchitectureError("trap address out of range in zone " + z.id);
    }
    const bool paired = addr.slot != Slot::Single;
    if (paired != (z.kind == ZoneKind::Entanglement)) {
      throw ArchitectureError("slot kind does not match zone kind in zone " +
                              z.id);
    }
  }

  std::vector<Zone> zones_;
  double acceleration_;
  double trapTransferTimeUs_;
  double interactionRadius_;
  Window window_;
  // sorted distinct physical coordinates per zone kind
  std::vector<double> storageRowCoords_, storageColCoords_;
  std::vector<double> entRowCoords_, entColCoords_;
};

inline void Architecture::validate() const {
  size_t nStorage = 0;
  size_t nEnt = 0;
  for (const auto& z : zones_) {
    if (z.rows < 1 || z.cols < 1) {
      throw ArchitectureError("zone " + z.id + ": rows and cols must be >= 1");
    }
    if (z.rowPitch <= 0 || z.colPitch <= 0) {
      throw ArchitectureError("zone " + z.id + ": pitches must be > 0");
    }
    if (z.kind == ZoneKind::Entanglement) {
      ++nEnt;
      if (z.pairOffset <= 0) {
        throw ArchitectureError("zone " + z.id + ": pair_offset must be > 0");
      }
      if (z.pairOffset >= z.colPitch) {
        throw ArchitectureError("zone " + z.id +
                                ": pair_offset must be < col_pitch");
      }
    } else {
      ++nStorage;
    }
  }
  if (nStorage < 1 || nEnt < 1) {
    throw ArchitectureError(
        "architecture needs at least one storage and one entanglement zone");
  }
  if (acceleration_ <= 0) {
    throw ArchitectureError("acceleration must be > 0");
  }
  if (trapTransferTimeUs_ < 0) {
    throw ArchitectureError("trap_transfer_time_us must be >= 0");
  }
  // pairwise overlap check on trap bounding boxes
  auto bounds = [](const Zone& z) {
    const double halfPair =
        z.kind == ZoneKind::Entanglement ? z.pairOffset / 2.0 : 0.0;
    return std::array<double, 4>{
        z.origin.x - halfPair,
        z.origin.x + static_cast<double>(z.cols - 1) * z.colPitch + halfPair,
        z.origin.y, z.origin.y + static_cast<double>(z.rows - 1) * z.rowPitch};
  };
  for (size_t i = 0; i < zones_.size(); ++i) {
    for (size_t j = i + 1; j < zones_.size(); ++j) {
      const auto a = bounds(zones_[i]);
      const auto b = bounds(zones_[j]);
      const bool overlapX = a[0] < b[1] && b[0] < a[1];
      const bool overlapY = a[2] < b[3] && b[2] < a[3];
      if (overlapX && overlapY) {
        throw ArchitectureError("zones " + zones_[i].id + " and " +
                                zones_[j].id + " overlap");
      }
    }
  }
}

inline void Architecture::buildGridIndex() {
  auto collect = [this](ZoneKind kind, std::vector<double>& rowsOut,
                        std::vector<double>& colsOut) {
    for (const auto& z : zones_) {
      if (z.kind != kind) {
        continue;
      }
      for (size_t r = 0; r < z.rows; ++r) {
        rowsOut.push_back(z.origin.y + static_cast<double>(r) * z.rowPitch);
      }
      for (size_t c = 0; c < z.cols; ++c) {
        const double x = z.origin.x + static_cast<double>(c) * z.colPitch;
        if (kind == ZoneKind::Entanglement) {
          colsOut.push_back(x - z.pairOffset / 2.0);
          colsOut.push_back(x + z.pairOffset / 2.0);
        } else {
          colsOut.push_back(x);
        }
      }
    }
    auto dedupe = [](std::vector<double>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedupe(rowsOut);
    dedupe(colsOut);
  };
  collect(ZoneKind::Storage, storageRowCoords_, storageColCoords_);
  collect(ZoneKind::Entanglement, entRowCoords_, entColCoords_);
}

inline auto Architecture::gridRow(const TrapAddress& addr) const -> int32_t {
  const auto& z = zone(addr.zone);
  const auto& coords = z.kind == ZoneKind::Storage ? storageRowCoords_
                                                   : entRowCoords_;
  const double y = trapPosition(addr).y;
  const auto it = std::lower_bound(coords.begin(), coords.end(), y);
  return static_cast<int32_t>(it - coords.begin());
}

inline auto Architecture::gridCol(const TrapAddress& addr) const -> int32_t {
  const auto& z = zone(addr.zone);
  const auto& coords = z.kind == ZoneKind::Storage ? storageColCoords_
                                                   : entColCoords_;
  const double x = trapPosition(addr).x;
  const auto it = std::lower_bound(coords.begin(), coords.end(), x);
  return static_cast<int32_t>(it - coords.begin());
}

inline auto Architecture::nearestSite(const Vec2& around,
                                      uint32_t zoneIdx) const -> TrapAddress {
  const auto& z = zone(zoneIdx);
  auto clampIdx = [](double v, size_t n) -> uint32_t {
    const auto r = static_cast<int64_t>(std::llround(v));
    return static_cast<uint32_t>(
        std::clamp<int64_t>(r, 0, static_cast<int64_t>(n) - 1));
  };
  // rounding to the grid gets within one cell; scan the 3x3 neighborhood for
  // exact nearest with deterministic ties
  const uint32_t r0 = clampIdx((around.y - z.origin.y) / z.rowPitch, z.rows);
  const uint32_t c0 = clampIdx((around.x - z.origin.x) / z.colPitch, z.cols);
  TrapAddress best{zoneIdx, r0, c0,
                   z.kind == ZoneKind::Entanglement ? Slot::PairLeft
                                                    : Slot::Single};
  double bestDist = norm(sitePosition(zoneIdx, r0, c0) - around);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const auto r = static_cast<int64_t>(r0) + dr;
      const auto c = static_cast<int64_t>(c0) + dc;
      if (r < 0 || c < 0 || r >= static_cast<int64_t>(z.rows) ||
          c >= static_cast<int64_t>(z.cols)) {
        continue;
      }
      const double d =
          norm(sitePosition(zoneIdx, static_cast<uint32_t>(r),
                            static_cast<uint32_t>(c)) -
               around);
      if (d < bestDist ||
          (d == bestDist && std::tie(r, c) < std::tie(best.row, best.col))) {
        bestDist = d;
        best.row = static_cast<uint32_t>(r);
        best.col = static_cast<uint32_t>(c);
      }
    }
  }
  return best;
}

inline auto Architecture::candidateTraps(const Vec2& around, uint32_t zoneIdx,
                                         const TrapSet& occupied,
                                         Window window, size_t minFree) const
    -> std::vector<TrapAddress> {
  const auto& z = zone(zoneIdx);
  if (window.rows < 1 || window.cols < 1) {
    throw ArchitectureError("candidate window extents must be >= 1");
  }
  const Slot siteSlot =
      z.kind == ZoneKind::Entanglement ? Slot::PairLeft : Slot::Single;
  auto siteFree = [&](uint32_t r, uint32_t c) {
    TrapAddress a{zoneIdx, r, c, siteSlot};
    if (occupied.contains(a)) {
      return false;
    }
    if (z.kind == ZoneKind::Entanglement) {
      return !occupied.contains(otherSlot(a));
    }
    return true;
  };

  const TrapAddress center = nearestSite(around, zoneIdx);
  std::vector<TrapAddress> free;
  Window w = window;
  while (true) {
    free.clear();
    const auto rHalf = static_cast<int64_t>(w.rows / 2);
    const auto cHalf = static_cast<int64_t>(w.cols / 2);
    const auto rLo = std::max<int64_t>(0, static_cast<int64_t>(center.row) -
                                              rHalf);
    const auto rHi = std::min<int64_t>(static_cast<int64_t>(z.rows) - 1,
                                       static_cast<int64_t>(center.row) +
                                           rHalf);
    const auto cLo = std::max<int64_t>(0, static_cast<int64_t>(center.col) -
                                              cHalf);
    const auto cHi = std::min<int64_t>(static_cast<int64_t>(z.cols) - 1,
                                       static_cast<int64_t>(center.col) +
                                           cHalf);
    for (auto r = rLo; r <= rHi; ++r) {
      for (auto c = cLo; c <= cHi; ++c) {
        if (siteFree(static_cast<uint32_t>(r), static_cast<uint32_t>(c))) {
          free.push_back({zoneIdx, static_cast<uint32_t>(r),
                          static_cast<uint32_t>(c), siteSlot});
        }
      }
    }
    const bool coversZone = rLo == 0 && cLo == 0 &&
                            rHi == static_cast<int64_t>(z.rows) - 1 &&
                            cHi == static_cast<int64_t>(z.cols) - 1;
    if (free.size() >= minFree || coversZone) {
      break;
    }
    ++w.rows;
    ++w.cols;
  }
  if (free.empty()) {
    throw CapacityError("zone " + z.id + " has no free trap");
  }
  std::sort(free.begin(), free.end(),
            [&](const TrapAddress& a, const TrapAddress& b) {
              const double da =
                  norm(sitePosition(a.zone, a.row, a.col) - around);
              const double db =
                  norm(sitePosition(b.zone, b.row, b.col) - around);
              if (da != db) {
                return da < db;
              }
              return std::tie(a.row, a.col) < std::tie(b.row, b.col);
            });
  return free;
}

inline auto Architecture::fromJsonValue(const nlohmann::json& j)
    -> Architecture {
  if (!j.is_object()) {
    throw ArchitectureError("architecture spec must be a JSON object");
  }
  if (!j.contains("zones") || !j["zones"].is_array()) {
    throw ArchitectureError("architecture spec needs a 'zones' array");
  }
  std::vector<Zone> zones;
  for (const auto& zj : j["zones"]) {
    Zone z;
    auto require = [&](const char* field) -> const nlohmann::json& {
      if (!zj.contains(field)) {
        throw ArchitectureError(std::string("zone is missing field '") +
                                field + "'");
      }
      return zj[field];
    };
    z.id = require("id").get<std::string>();
    const auto kind = require("kind").get<std::string>();
    if (kind == "storage") {
      z.kind = ZoneKind::Storage;
    } else if (kind == "entanglement") {
      z.kind = ZoneKind::Entanglement;
    } else {
      throw ArchitectureError("zone " + z.id + ": unknown kind '" + kind +
                              "'");
    }
    const auto& origin = require("origin");
    if (!origin.is_array() || origin.size() != 2) {
      throw ArchitectureError("zone " + z.id +
                              ": origin must be a [x, y] array");
    }
    z.origin = {origin[0].get<double>(), origin[1].get<double>()};
    z.rows = require("rows").get<size_t>();
    z.cols = require("cols").get<size_t>();
    z.rowPitch = require("row_pitch").get<double>();
    z.colPitch = require("col_pitch").get<double>();
    if (z.kind == ZoneKind::Entanglement) {
      z.pairOffset = require("pair_offset").get<double>();
    } else if (zj.contains("pair_offset")) {
      throw ArchitectureError("zone " + z.id +
                              ": pair_offset is only valid in "
                              "entanglement zones");
    }
    zones.push_back(std::move(z));
  }
  const double acc = j.value("acceleration", 2750.0);
  const double transfer = j.value("trap_transfer_time_us", 15.0);
  if (!j.contains("interaction_radius")) {
    throw ArchitectureError("architecture spec needs 'interaction_radius'");
  }
  const double radius = j["interaction_radius"].get<double>();
  Window window;
  if (j.contains("window")) {
    window.rows = j["window"].value("rows", window.rows);
    window.cols = j["window"].value("cols", window.cols);
  }
  return Architecture(std::move(zones), acc, transfer, radius, window);
}

inline auto Architecture::fromJson(const std::string& text) -> Architecture {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArchitectureError(std::string("architecture spec parse error: ") +
                            e.what());
  }
  return fromJsonValue(j);
}

} // namespace zonec
