#include "test_util.hpp"
#include "zonec/arch.hpp"

#include <gtest/gtest.h>
#include <random>
#include <set>

namespace zonec {
namespace {

TEST(ArchLoad, MinimalSpecParses) {
  const auto arch = Architecture::fromJson(R"({
    "zones": [
      {"id": "mem", "kind": "storage", "origin": [0, 30], "rows": 10,
       "cols": 10, "row_pitch": 5, "col_pitch": 5},
      {"id": "ent", "kind": "entanglement", "origin": [0, 0], "rows": 2,
       "cols": 10, "row_pitch": 10, "col_pitch": 12, "pair_offset": 2}
    ],
    "interaction_radius": 2
  })");
  EXPECT_EQ(arch.zones().size(), 2U);
  EXPECT_EQ(arch.zone(arch.zoneIndex("mem")).kind, ZoneKind::Storage);
  EXPECT_EQ(arch.zone(arch.zoneIndex("ent")).kind, ZoneKind::Entanglement);
}

TEST(ArchLoad, AccelerationDefaults) {
  const auto arch = testutil::miniArch();
  EXPECT_DOUBLE_EQ(arch.accelerationMps2(), 2750.0);
  EXPECT_DOUBLE_EQ(arch.trapTransferTimeUs(), 15.0);
}

TEST(ArchLoad, OverlappingZonesRejected) {
  try {
    Architecture::fromJson(R"({
      "zones": [
        {"id": "a", "kind": "storage", "origin": [0, 0], "rows": 5,
         "cols": 5, "row_pitch": 5, "col_pitch": 5},
        {"id": "b", "kind": "entanglement", "origin": [10, 10], "rows": 2,
         "cols": 4, "row_pitch": 10, "col_pitch": 12, "pair_offset": 2}
      ],
      "interaction_radius": 2
    })");
    FAIL() << "expected a validation error";
  } catch (const ArchitectureError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("a"), std::string::npos);
    EXPECT_NE(msg.find("b"), std::string::npos);
    EXPECT_NE(msg.find("overlap"), std::string::npos);
  }
}

TEST(ArchLoad, FieldErrorsNameTheField) {
  EXPECT_THROW(Architecture::fromJson(R"({
      "zones": [{"id": "a", "kind": "storage", "origin": [0, 0], "rows": 5,
                 "cols": 5, "row_pitch": 0, "col_pitch": 5}],
      "interaction_radius": 2
    })"),
               ArchitectureError);
  EXPECT_THROW(Architecture::fromJson("not json"), ArchitectureError);
  EXPECT_THROW(Architecture::fromJson(R"({"zones": []})"), ArchitectureError);
}

TEST(TrapPosition, FollowsTheGrid) {
  const auto arch = testutil::gridArch();
  const auto mem = arch.zoneIndex("mem");
  const auto p0 = arch.trapPosition({mem, 0, 0, Slot::Single});
  EXPECT_EQ(p0, (Vec2{0, 40}));
  const auto p = arch.trapPosition({mem, 2, 3, Slot::Single});
  EXPECT_DOUBLE_EQ(p.x, 15);
  EXPECT_DOUBLE_EQ(p.y, 50);
}

TEST(TrapPosition, PairSlotsStraddleTheSite) {
  const auto arch = Architecture::fromJson(R"({
    "zones": [
      {"id": "ent", "kind": "entanglement", "origin": [0, 100], "rows": 1,
       "cols": 4, "row_pitch": 10, "col_pitch": 20, "pair_offset": 4},
      {"id": "mem", "kind": "storage", "origin": [0, 0], "rows": 1,
       "cols": 4, "row_pitch": 5, "col_pitch": 5}
    ],
    "interaction_radius": 2.5
  })");
  const auto ent = arch.zoneIndex("ent");
  const auto right = arch.trapPosition({ent, 0, 1, Slot::PairRight});
  EXPECT_DOUBLE_EQ(right.x, 22);
  EXPECT_DOUBLE_EQ(right.y, 100);
  const auto left = arch.trapPosition({ent, 0, 1, Slot::PairLeft});
  EXPECT_DOUBLE_EQ(left.x, 18);
}

TEST(TrapPosition, InjectiveOverValidAddresses) {
  const auto arch = testutil::gridArch(6, 6, 2, 5);
  std::set<std::pair<int64_t, int64_t>> seen;
  size_t count = 0;
  for (uint32_t zi = 0; zi < arch.zones().size(); ++zi) {
    const auto& z = arch.zone(zi);
    for (uint32_t r = 0; r < z.rows; ++r) {
      for (uint32_t c = 0; c < z.cols; ++c) {
        const auto slots =
            z.kind == ZoneKind::Entanglement
                ? std::vector<Slot>{Slot::PairLeft, Slot::PairRight}
                : std::vector<Slot>{Slot::Single};
        for (const Slot s : slots) {
          const auto p = arch.trapPosition({zi, r, c, s});
          seen.insert({std::llround(p.x * 1000), std::llround(p.y * 1000)});
          ++count;
        }
      }
    }
  }
  EXPECT_EQ(seen.size(), count);
}

TEST(TrapPosition, OutOfRangeRejected) {
  const auto arch = testutil::gridArch();
  const auto mem = arch.zoneIndex("mem");
  EXPECT_THROW(arch.trapPosition({mem, 99, 0, Slot::Single}),
               ArchitectureError);
  EXPECT_THROW(arch.trapPosition({mem, 0, 0, Slot::PairLeft}),
               ArchitectureError);
}

TEST(Distance, MetricAxiomsOnSampledTriples) {
  const auto arch = testutil::gridArch();
  std::mt19937 rng(7);
  const auto mem = arch.zoneIndex("mem");
  const auto& z = arch.zone(mem);
  auto randomTrap = [&]() -> TrapAddress {
    return {mem, static_cast<uint32_t>(rng() % z.rows),
            static_cast<uint32_t>(rng() % z.cols), Slot::Single};
  };
  for (int i = 0; i < 200; ++i) {
    const auto a = randomTrap();
    const auto b = randomTrap();
    const auto c = randomTrap();
    EXPECT_DOUBLE_EQ(arch.distance(a, b), arch.distance(b, a));
    EXPECT_DOUBLE_EQ(arch.distance(a, a), 0.0);
    EXPECT_LE(arch.distance(a, c),
              arch.distance(a, b) + arch.distance(b, c) + 1e-12);
    if (!(a == b)) {
      EXPECT_GT(arch.distance(a, b), 0.0);
    }
  }
}

TEST(Distance, KnownValues) {
  const auto arch = testutil::gridArch();
  const auto mem = arch.zoneIndex("mem");
  EXPECT_DOUBLE_EQ(
      arch.distance({mem, 0, 0, Slot::Single}, {mem, 0, 1, Slot::Single}),
      5.0);
  // (30, 40) offset -> 3-4-5 triangle
  EXPECT_DOUBLE_EQ(
      arch.distance({mem, 0, 0, Slot::Single}, {mem, 8, 6, Slot::Single}),
      50.0);
}

TEST(CandidateTraps, EmptyZoneWindowNearestFirst) {
  const auto arch = testutil::gridArch();
  const auto mem = arch.zoneIndex("mem");
  const Vec2 around = arch.trapPosition({mem, 5, 5, Slot::Single});
  const auto result = arch.candidateTraps(around, mem, {}, {3, 3});
  ASSERT_EQ(result.size(), 9U);
  EXPECT_EQ(result.front(), (TrapAddress{mem, 5, 5, Slot::Single}));
  for (const auto& t : result) {
    EXPECT_GE(t.row + 1U, 5U);
    EXPECT_LE(t.row, 6U);
    EXPECT_GE(t.col + 1U, 5U);
    EXPECT_LE(t.col, 6U);
  }
  // sorted by distance (re-sort check)
  for (size_t i = 0; i + 1 < result.size(); ++i) {
    const auto di = norm(arch.trapPosition(result[i]) - around);
    const auto dj = norm(arch.trapPosition(result[i + 1]) - around);
    EXPECT_LE(di, dj);
  }
}

TEST(CandidateTraps, AutoExpansionFindsTheFreeCorner) {
  // 8x8 grid, fully occupied except one far corner; the window must grow
  // until the corner shows up
  const auto arch = testutil::gridArch(8, 8);
  const auto mem = arch.zoneIndex("mem");
  TrapSet occupied;
  for (uint32_t r = 0; r < 8; ++r) {
    for (uint32_t c = 0; c < 8; ++c) {
      if (r == 7 && c == 7) {
        continue;
      }
      occupied.insert({mem, r, c, Slot::Single});
    }
  }
  const Vec2 around = arch.trapPosition({mem, 0, 0, Slot::Single});
  const auto result = arch.candidateTraps(around, mem, occupied, {3, 3}, 1);
  ASSERT_EQ(result.size(), 1U);
  EXPECT_EQ(result.front(), (TrapAddress{mem, 7, 7, Slot::Single}));
}

TEST(CandidateTraps, ReturnsOnlyFreeTraps) {
  const auto arch = testutil::gridArch(8, 8);
  const auto mem = arch.zoneIndex("mem");
  std::mt19937 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    TrapSet occupied;
    for (uint32_t r = 0; r < 8; ++r) {
      for (uint32_t c = 0; c < 8; ++c) {
        if (rng() % 2 == 0) {
          occupied.insert({mem, r, c, Slot::Single});
        }
      }
    }
    const Vec2 around =
        arch.trapPosition({mem, static_cast<uint32_t>(rng() % 8),
                           static_cast<uint32_t>(rng() % 8), Slot::Single});
    const size_t minFree = 1 + rng() % 5;
    std::vector<TrapAddress> result;
    try {
      result = arch.candidateTraps(around, mem, occupied, {3, 3}, minFree);
    } catch (const CapacityError&) {
      continue;
    }
    for (const auto& t : result) {
      EXPECT_FALSE(occupied.contains(t));
    }
    const size_t totalFree = 64 - occupied.size();
    EXPECT_GE(result.size(), std::min(minFree, totalFree));
  }
}

TEST(CandidateTraps, FullyOccupiedZoneIsACapacityError) {
  const auto arch = testutil::gridArch(3, 3);
  const auto mem = arch.zoneIndex("mem");
  TrapSet occupied;
  for (uint32_t r = 0; r < 3; ++r) {
    for (uint32_t c = 0; c < 3; ++c) {
      occupied.insert({mem, r, c, Slot::Single});
    }
  }
  EXPECT_THROW(
      arch.candidateTraps({0, 0}, mem, occupied, {3, 3}, 1),
      CapacityError);
}

TEST(CandidateTraps, EntanglementSiteFreeMeansBothSlots) {
  const auto arch = testutil::gridArch();
  const auto ent = arch.zoneIndex("ent");
  TrapSet occupied;
  occupied.insert({ent, 0, 2, Slot::PairRight});
  const auto result =
      arch.candidateTraps(arch.sitePosition(ent, 0, 2), ent, occupied, {1, 3});
  for (const auto& t : result) {
    EXPECT_FALSE(t.row == 0 && t.col == 2);
    EXPECT_EQ(t.slot, Slot::PairLeft);
  }
}

} // namespace
} // namespace zonec
