#include "zonec/circuit.hpp"

#include <gtest/gtest.h>
#include <random>

namespace zonec {
namespace {

TEST(ParseQasm, SingleGateProgram) {
  const auto c = parseQasm("qreg q[2]; cz q[0],q[1];");
  EXPECT_EQ(c.numQubits, 2U);
  ASSERT_EQ(c.gates.size(), 1U);
  EXPECT_EQ(c.gates[0], Gate::cz(0, 1));
}

TEST(ParseQasm, HeaderAndIncludeSkipped) {
  const auto c = parseQasm(R"(OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
h q[0];
cz q[0],q[1];
rz(0.25) q[2];
)");
  EXPECT_EQ(c.numQubits, 3U);
  ASSERT_EQ(c.gates.size(), 3U);
  EXPECT_EQ(c.gates[0], Gate::oneQubit("h", 0));
  EXPECT_EQ(c.gates[1], Gate::cz(0, 1));
  EXPECT_EQ(c.gates[2], Gate::oneQubit("rz", 2));
}

TEST(ParseQasm, UnsupportedMultiQubitGateNamed) {
  try {
    parseQasm("qreg q[3]; ccx q[0],q[1],q[2];");
    FAIL() << "expected UnsupportedGateError";
  } catch (const UnsupportedGateError& e) {
    EXPECT_EQ(e.gate, "ccx");
  }
  EXPECT_THROW(parseQasm("qreg q[2]; cx q[0],q[1];"), UnsupportedGateError);
}

TEST(ParseQasm, SyntaxErrorCarriesLineAndColumn) {
  try {
    parseQasm("qreg q[2];\ncz q[0] q[1];");
    FAIL() << "expected CircuitParseError";
  } catch (const CircuitParseError& e) {
    EXPECT_EQ(e.line, 2U);
    EXPECT_GT(e.column, 1U);
  }
}

TEST(ParseQasm, OperandOutOfRangeRejected) {
  EXPECT_THROW(parseQasm("qreg q[2]; cz q[0],q[5];"), CircuitParseError);
  EXPECT_THROW(parseQasm("qreg q[2]; h r[0];"), CircuitParseError);
}

TEST(ParseJson, GhzChainKeepsOrder) {
  const auto c = parseCircuit(R"({
    "num_qubits": 3,
    "gates": [
      {"kind": "1q", "name": "h", "operands": [0]},
      {"kind": "cz", "operands": [0, 1]},
      {"kind": "cz", "operands": [1, 2]}
    ]
  })",
                              CircuitFormat::Json);
  ASSERT_EQ(c.gates.size(), 3U);
  EXPECT_EQ(c.gates[0], Gate::oneQubit("h", 0));
  EXPECT_EQ(c.gates[1], Gate::cz(0, 1));
  EXPECT_EQ(c.gates[2], Gate::cz(1, 2));
}

TEST(ParseJson, Roundtrip) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Circuit c;
    c.numQubits = 2 + rng() % 8;
    const size_t gateCount = rng() % 20;
    for (size_t i = 0; i < gateCount; ++i) {
      if (rng() % 2 == 0) {
        c.gates.push_back(Gate::oneQubit(rng() % 2 == 0 ? "h" : "rz",
                                         rng() % c.numQubits));
      } else {
        const auto a = static_cast<uint32_t>(rng() % c.numQubits);
        auto b = static_cast<uint32_t>(rng() % c.numQubits);
        if (a == b) {
          b = (b + 1) % c.numQubits;
        }
        c.gates.push_back(Gate::cz(a, b));
      }
    }
    const auto text = circuitToJson(c).dump();
    EXPECT_EQ(parseCircuit(text, CircuitFormat::Json), c);
  }
}

TEST(ParseJson, BadOperandsRejected) {
  EXPECT_THROW(parseCircuit(R"({"num_qubits": 2,
    "gates": [{"kind": "cz", "operands": [0, 4]}]})",
                            CircuitFormat::Json),
               CircuitParseError);
  EXPECT_THROW(parseCircuit(R"({"num_qubits": 2,
    "gates": [{"kind": "ccx", "operands": [0, 1]}]})",
                            CircuitFormat::Json),
               UnsupportedGateError);
}

TEST(QasmRoundtrip, ThroughTheGenerator) {
  Circuit c;
  c.numQubits = 4;
  c.gates = {Gate::oneQubit("h", 0), Gate::cz(0, 1), Gate::cz(2, 3),
             Gate::oneQubit("rz", 3)};
  EXPECT_EQ(parseQasm(circuitToQasm(c)), c);
}

} // namespace
} // namespace zonec
