#include "oracles.hpp"
#include "zonec/compat.hpp"

#include <gtest/gtest.h>
#include <random>

namespace zonec {
namespace {

TEST(Discretize, SingleAtomGetsRankZero) {
  const std::vector<std::pair<uint32_t, Vec2>> movers{{7, {123.0, -4.5}}};
  const auto ranks = discretize(movers);
  EXPECT_EQ(ranks.at(7).row, 0);
  EXPECT_EQ(ranks.at(7).col, 0);
}

TEST(Discretize, RanksAmongMovingAtoms) {
  // lower-left atom of a two-row pack: second-lowest y, smallest x
  const std::vector<std::pair<uint32_t, Vec2>> movers{
      {0, {0.0, 10.0}}, {1, {5.0, 10.0}}, {2, {2.0, 5.0}}, {3, {7.0, 20.0}}};
  const auto ranks = discretize(movers);
  EXPECT_EQ(ranks.at(0).row, 1);
  EXPECT_EQ(ranks.at(0).col, 0);
  EXPECT_EQ(ranks.at(2).row, 0);
  EXPECT_EQ(ranks.at(3).row, 2);
  EXPECT_EQ(ranks.at(3).col, 3);
}

TEST(Discretize, EqualCoordinatesShareARank) {
  const std::vector<std::pair<uint32_t, Vec2>> movers{
      {0, {1.0, 10.0}}, {1, {2.0, 10.0}}, {2, {3.0, 20.0}}};
  const auto ranks = discretize(movers);
  EXPECT_EQ(ranks.at(0).row, 0);
  EXPECT_EQ(ranks.at(1).row, 0);
  EXPECT_EQ(ranks.at(2).row, 1);
}

TEST(IsCompatible, ExactMatchConditionNeedsEqualValue) {
  // row tree holds 0 -> 0; a new row mapping 0 -> 1 conflicts
  MovementGroup group;
  group.add({0, 0, 0, 0, 0, 1.0}, true);
  Movement conflicting{1, 0, 5, 1, 6, 1.0};
  EXPECT_FALSE(group.isCompatible(conflicting));
  Movement matching{1, 0, 5, 0, 6, 1.0};
  EXPECT_TRUE(group.isCompatible(matching));
}

TEST(IsCompatible, BetweennessAgainstNeighbors) {
  // column tree holds 2 -> 2 and 4 -> 3; key 3 -> 2 violates 2 < 2 < 3
  MovementGroup group;
  group.add({0, 0, 2, 0, 2, 1.0}, true);
  group.add({1, 1, 4, 1, 3, 1.0}, true);
  Movement squeezed{2, 2, 3, 2, 2, 1.0};
  EXPECT_FALSE(group.isCompatible(squeezed));
  // missing neighbors bound with infinities
  Movement below{3, 3, 0, 3, 0, 1.0};
  EXPECT_TRUE(group.isCompatible(below));
  Movement above{4, 4, 7, 4, 9, 1.0};
  EXPECT_TRUE(group.isCompatible(above));
}

TEST(IsCompatible, EmptyGroupAcceptsAnything) {
  MovementGroup group;
  EXPECT_TRUE(group.isCompatible({0, 3, 5, 9, 1, 2.0}));
}

TEST(Insert, ParallelMovementsShareAGroup) {
  GroupSet gs;
  gs.insert({0, 0, 0, 2, 3, 5.0});
  gs.insert({1, 1, 1, 3, 4, 5.0});
  EXPECT_EQ(gs.size(), 1U);
}

TEST(Insert, CrossingMovementsSplitIntoTwoSteps) {
  // two atoms drift right while one overtakes them leftwards
  GroupSet gs;
  gs.insert({0, 0, 0, 0, 1, 8.0});
  gs.insert({1, 0, 1, 0, 2, 8.0});
  gs.insert({2, 0, 2, 0, 0, 9.0});
  EXPECT_EQ(gs.size(), 2U);
  EXPECT_EQ(gs[0].members().size(), 2U);
  EXPECT_EQ(gs[1].members().size(), 1U);
}

TEST(Insert, MatchesFirstFitOracleOnRandomInstances) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const size_t n = 1 + rng() % 10;
    const int gridRows = 2 + static_cast<int>(rng() % 7);
    const int gridCols = 2 + static_cast<int>(rng() % 7);
    std::vector<std::pair<int, int>> srcs;
    std::vector<std::pair<int, int>> dsts;
    for (int r = 0; r < gridRows; ++r) {
      for (int c = 0; c < gridCols; ++c) {
        srcs.emplace_back(r, c);
        dsts.emplace_back(r, c);
      }
    }
    std::shuffle(srcs.begin(), srcs.end(), rng);
    std::shuffle(dsts.begin(), dsts.end(), rng);
    if (srcs.size() < n) {
      continue;
    }
    std::vector<oracle::GridMove> moves;
    GroupSet gs;
    for (size_t i = 0; i < n; ++i) {
      oracle::GridMove gm{srcs[i].first, srcs[i].second, dsts[i].first,
                          dsts[i].second, 1.0};
      moves.push_back(gm);
      gs.insert({static_cast<uint32_t>(i), gm.srcRow, gm.srcCol, gm.dstRow,
                 gm.dstCol, gm.dist});
    }
    const auto expected = oracle::firstFitGroups(moves);
    ASSERT_EQ(gs.size(), expected.size()) << "trial " << trial;
    for (size_t g = 0; g < expected.size(); ++g) {
      EXPECT_EQ(gs[g].members().size(), expected[g].size());
    }
    // membership agreement: every structure group satisfies the pairwise
    // oracle, and isCompatible agrees with the brute-force group check
    for (size_t g = 0; g < gs.size(); ++g) {
      std::vector<oracle::GridMove> members;
      for (const auto& m : gs[g].members()) {
        members.push_back({m.srcRow, m.srcCol, m.dstRow, m.dstCol, m.dist});
      }
      for (size_t i = 0; i < members.size(); ++i) {
        for (size_t j = i + 1; j < members.size(); ++j) {
          EXPECT_TRUE(oracle::pairCompatible(members[i], members[j]));
        }
      }
      for (size_t i = 0; i < n; ++i) {
        const Movement probe{static_cast<uint32_t>(100 + i),
                             moves[i].srcRow,
                             moves[i].srcCol,
                             moves[i].dstRow,
                             moves[i].dstCol,
                             1.0};
        EXPECT_EQ(gs[g].isCompatible(probe),
                  oracle::groupCompatible(members, moves[i]));
      }
    }
  }
}

TEST(Insert, GroupCountNeverExceedsMovementCount) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 1 + rng() % 12;
    GroupSet gs;
    for (size_t i = 0; i < n; ++i) {
      gs.insert({static_cast<uint32_t>(i), static_cast<int>(rng() % 8),
                 static_cast<int>(rng() % 8), static_cast<int>(rng() % 8),
                 static_cast<int>(rng() % 8), 1.0});
    }
    EXPECT_LE(gs.size(), n);
    EXPECT_GE(gs.size(), 1U);
  }
}

TEST(GroupSd, ScaledDifferencesHalfSpread) {
  // four columns mapping into eight with the gap pattern preserved:
  // differences [0, -1, 0, -1] at factor 2
  MovementGroup group;
  group.add({0, 0, 0, 0, 0, 1.0}, true);
  group.add({1, 0, 1, 0, 1, 1.0}, true);
  group.add({2, 0, 2, 0, 4, 1.0}, true);
  group.add({3, 0, 3, 0, 5, 1.0}, true);
  const auto [sdRow, sdCol] = group.sd({2.0, 2.0});
  EXPECT_DOUBLE_EQ(sdCol, 0.5);
}

TEST(GroupSd, CompactedPlacementSpreadsMore) {
  // the same four columns packed densely: differences [0, -1, -2, -3]
  MovementGroup group;
  group.add({0, 0, 0, 0, 0, 1.0}, true);
  group.add({1, 0, 1, 0, 1, 1.0}, true);
  group.add({2, 0, 2, 0, 2, 1.0}, true);
  group.add({3, 0, 3, 0, 3, 1.0}, true);
  const auto [sdRow, sdCol] = group.sd({2.0, 2.0});
  EXPECT_NEAR(sdCol, 1.118, 0.0005);
}

TEST(GroupSd, SingleEntryHasZeroSpread) {
  MovementGroup group;
  group.add({0, 3, 4, 7, 9, 2.0}, true);
  const auto [sdRow, sdCol] = group.sd({2.0, 3.0});
  EXPECT_DOUBLE_EQ(sdRow, 0.0);
  EXPECT_DOUBLE_EQ(sdCol, 0.0);
}

TEST(GroupSd, PopulationNotSample) {
  // two entries with differences {0, 1}: population SD 0.5, sample 0.707
  MovementGroup group;
  group.add({0, 0, 0, 0, 0, 1.0}, true);
  group.add({1, 1, 1, 1, 2, 1.0}, true);
  const auto [sdRow, sdCol] = group.sd({1.0, 1.0});
  EXPECT_DOUBLE_EQ(sdCol, 0.5);
}

TEST(DMax, EmptyGroupIsZero) {
  MovementGroup group;
  EXPECT_DOUBLE_EQ(group.dMax(), 0.0);
}

TEST(DMax, TracksTheMaximumThroughInserts) {
  GroupSet gs;
  gs.insert({0, 0, 0, 1, 1, 5.0});
  gs.insert({1, 1, 1, 2, 2, 12.0});
  gs.insert({2, 2, 2, 3, 3, 7.0});
  ASSERT_EQ(gs.size(), 1U);
  EXPECT_DOUBLE_EQ(gs[0].dMax(), 12.0);
  gs.insert({3, 3, 3, 4, 4, 20.0});
  EXPECT_DOUBLE_EQ(gs[0].dMax(), 20.0);
}

TEST(GroupInvariant, MapsStayStrictlyIncreasing) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    GroupSet gs;
    const size_t n = 1 + rng() % 10;
    for (size_t i = 0; i < n; ++i) {
      gs.insert({static_cast<uint32_t>(i), static_cast<int>(rng() % 6),
                 static_cast<int>(rng() % 6), static_cast<int>(rng() % 6),
                 static_cast<int>(rng() % 6), 1.0});
    }
    for (const auto& g : gs.groups()) {
      for (const auto* map : {&g.rowMap(), &g.colMap()}) {
        const auto& e = map->entries();
        for (size_t i = 0; i + 1 < e.size(); ++i) {
          EXPECT_LT(e[i].first, e[i + 1].first);
          EXPECT_LT(e[i].second, e[i + 1].second);
        }
      }
    }
  }
}

} // namespace
} // namespace zonec
