#include "oracles.hpp"
#include "zonec/generators.hpp"
#include "zonec/schedule.hpp"

#include <gtest/gtest.h>
#include <random>
#include <set>

namespace zonec {
namespace {

auto checkInvariants(const Schedule& s, const Circuit& c) {
  // strict alternation starting with a one-qubit layer
  for (size_t i = 0; i < s.layers.size(); ++i) {
    const auto expected =
        i % 2 == 0 ? Layer::Kind::OneQubit : Layer::Kind::TwoQubit;
    EXPECT_EQ(s.layers[i].kind, expected) << "layer " << i;
    if (s.layers[i].kind == Layer::Kind::TwoQubit) {
      EXPECT_FALSE(s.layers[i].gates.empty());
      std::set<uint32_t> used;
      for (const auto& g : s.layers[i].gates) {
        EXPECT_EQ(g.kind, Gate::Kind::Cz);
        EXPECT_TRUE(used.insert(g.qubits[0]).second);
        EXPECT_TRUE(used.insert(g.qubits[1]).second);
      }
    }
  }
  // every gate appears exactly once, order preserved per qubit
  std::vector<Gate> flattened;
  for (const auto& l : s.layers) {
    flattened.insert(flattened.end(), l.gates.begin(), l.gates.end());
  }
  EXPECT_EQ(flattened.size(), c.gates.size());
  for (uint32_t q = 0; q < c.numQubits; ++q) {
    std::vector<Gate> inCircuit;
    std::vector<Gate> inSchedule;
    for (const auto& g : c.gates) {
      if (g.actsOn(q)) {
        inCircuit.push_back(g);
      }
    }
    for (const auto& g : flattened) {
      if (g.actsOn(q)) {
        inSchedule.push_back(g);
      }
    }
    EXPECT_EQ(inCircuit, inSchedule) << "qubit " << q;
  }
}

TEST(ScheduleAsap, DisjointGatesShareALayer) {
  Circuit c;
  c.numQubits = 4;
  c.gates = {Gate::cz(0, 1), Gate::cz(2, 3)};
  const auto s = scheduleAsap(c);
  EXPECT_EQ(s.numTwoQubitLayers(), 1U);
  EXPECT_EQ(s.twoQubitLayers()[0]->gates.size(), 2U);
  checkInvariants(s, c);
}

TEST(ScheduleAsap, SharedQubitForcesSerialization) {
  Circuit c;
  c.numQubits = 3;
  c.gates = {Gate::cz(0, 1), Gate::cz(1, 2)};
  const auto s = scheduleAsap(c);
  ASSERT_EQ(s.numTwoQubitLayers(), 2U);
  // the separating one-qubit layer exists and is empty
  ASSERT_EQ(s.layers.size(), 4U);
  EXPECT_EQ(s.layers[2].kind, Layer::Kind::OneQubit);
  EXPECT_TRUE(s.layers[2].gates.empty());
  checkInvariants(s, c);
}

TEST(ScheduleAsap, LinearChainWithInterleavedRotations) {
  Circuit c;
  c.numQubits = 5;
  for (uint32_t q = 0; q < 5; ++q) {
    c.gates.push_back(Gate::oneQubit("h", q));
  }
  for (uint32_t q = 0; q + 1 < 5; ++q) {
    c.gates.push_back(Gate::cz(q, q + 1));
    c.gates.push_back(Gate::oneQubit("h", q));
  }
  const auto s = scheduleAsap(c);
  EXPECT_EQ(s.numTwoQubitLayers(), oracle::twoQubitDagDepth(c));
  EXPECT_EQ(s.numTwoQubitLayers(), 4U);
  checkInvariants(s, c);
}

TEST(ScheduleAsap, DepthMatchesDagOracleOnRandomCircuits) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Circuit c;
    c.numQubits = 2 + rng() % 7;
    const size_t gateCount = rng() % 21;
    for (size_t i = 0; i < gateCount; ++i) {
      if (rng() % 4 == 0) {
        c.gates.push_back(Gate::oneQubit("h", rng() % c.numQubits));
      } else {
        const auto a = static_cast<uint32_t>(rng() % c.numQubits);
        auto b = static_cast<uint32_t>(rng() % c.numQubits);
        if (a == b) {
          b = (b + 1) % c.numQubits;
        }
        c.gates.push_back(Gate::cz(a, b));
      }
    }
    const auto s = scheduleAsap(c);
    EXPECT_EQ(s.numTwoQubitLayers(), oracle::twoQubitDagDepth(c));
    checkInvariants(s, c);
  }
}

TEST(AnalyzeReuse, SharedAtomMarked) {
  Circuit c;
  c.numQubits = 3;
  c.gates = {Gate::cz(0, 1), Gate::cz(0, 2)};
  const auto marks = analyzeReuse(scheduleAsap(c));
  ASSERT_EQ(marks.marks.size(), 1U);
  EXPECT_EQ(marks.at(0), (std::unordered_set<uint32_t>{0}));
}

TEST(AnalyzeReuse, DisjointLayersUnmarked) {
  Circuit c;
  c.numQubits = 4;
  c.gates = {Gate::cz(0, 1), Gate::cz(1, 2), Gate::cz(0, 3)};
  // layers: {cz(0,1)}, {cz(1,2), cz(0,3)} -> both 0 and 1 shared
  const auto marks = analyzeReuse(scheduleAsap(c));
  ASSERT_EQ(marks.marks.size(), 1U);
  EXPECT_EQ(marks.at(0), (std::unordered_set<uint32_t>{0, 1}));
}

TEST(AnalyzeReuse, StarChainMarksTheHubAtEveryBoundary) {
  // atom 0 partakes in all four layers
  Circuit c;
  c.numQubits = 5;
  c.gates = {Gate::cz(0, 1), Gate::cz(0, 2), Gate::cz(0, 3), Gate::cz(0, 4)};
  const auto marks = analyzeReuse(scheduleAsap(c));
  ASSERT_EQ(marks.marks.size(), 3U);
  for (const auto& m : marks.marks) {
    EXPECT_TRUE(m.contains(0));
  }
}

TEST(AnalyzeReuse, MarksEqualOperandIntersection) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = generateCircuit(trial % 2 == 0 ? "qft" : "wstate",
                                   3 + rng() % 6);
    const auto s = scheduleAsap(c);
    const auto marks = analyzeReuse(s);
    const auto layers = s.twoQubitLayers();
    for (size_t k = 0; k + 1 < layers.size(); ++k) {
      std::unordered_set<uint32_t> expected;
      for (const auto& g : layers[k]->gates) {
        for (const auto& h : layers[k + 1]->gates) {
          for (const uint32_t q : {g.qubits[0], g.qubits[1]}) {
            if (h.actsOn(q)) {
              expected.insert(q);
            }
          }
        }
      }
      EXPECT_EQ(marks.at(k), expected);
    }
  }
}

TEST(ScheduleJson, DumpsLayers) {
  Circuit c;
  c.numQubits = 2;
  c.gates = {Gate::oneQubit("h", 0), Gate::cz(0, 1)};
  const auto j = scheduleToJson(scheduleAsap(c));
  ASSERT_TRUE(j.contains("layers"));
  EXPECT_EQ(j["layers"].size(), 2U);
  EXPECT_EQ(j["layers"][0]["kind"], "1q");
  EXPECT_EQ(j["layers"][1]["kind"], "2q");
}

} // namespace
} // namespace zonec
