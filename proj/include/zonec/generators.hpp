#pragma once

#include "zonec/circuit.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace zonec {

/// Trotterized transverse-field chain: per round a global rotation layer
/// followed by cz on even pairs, then cz on odd pairs. Wide parallel layers.
inline auto genIsing(size_t numQubits, size_t rounds = 1) -> Circuit {
  Circuit c;
  c.numQubits = numQubits;
  for (size_t round = 0; round < rounds; ++round) {
    for (uint32_t q = 0; q < numQubits; ++q) {
      c.gates.push_back(Gate::oneQubit("rx", q));
    }
    for (uint32_t q = 0; q + 1 < numQubits; q += 2) {
      c.gates.push_back(Gate::cz(q, q + 1));
    }
    for (uint32_t q = 1; q + 1 < numQubits; q += 2) {
      c.gates.push_back(Gate::cz(q, q + 1));
    }
  }
  return c;
}

/// Serial entangling chain: one gate per layer, neighbor reused throughout.
inline auto genGhz(size_t numQubits) -> Circuit {
  Circuit c;
  c.numQubits = numQubits;
  c.gates.push_back(Gate::oneQubit("h", 0));
  for (uint32_t q = 0; q + 1 < numQubits; ++q) {
    c.gates.push_back(Gate::oneQubit("h", q + 1));
    c.gates.push_back(Gate::cz(q, q + 1));
    c.gates.push_back(Gate::oneQubit("h", q + 1));
  }
  return c;
}

/// All-to-all controlled-phase pattern: qubit i interacts with every later
/// qubit in turn, a long run of consecutive layers sharing one atom.
inline auto genQftLike(size_t numQubits) -> Circuit {
  Circuit c;
  c.numQubits = numQubits;
  for (uint32_t i = 0; i < numQubits; ++i) {
    c.gates.push_back(Gate::oneQubit("h", i));
    for (uint32_t j = i + 1; j < numQubits; ++j) {
      c.gates.push_back(Gate::cz(i, j));
    }
  }
  return c;
}

/// W-state style chain: rotation, entangle, un-rotate down the line with the
/// pair repeated, giving short reuse runs of two layers each.
inline auto genWstate(size_t numQubits) -> Circuit {
  Circuit c;
  c.numQubits = numQubits;
  c.gates.push_back(Gate::oneQubit("ry", 0));
  for (uint32_t q = 0; q + 1 < numQubits; ++q) {
    c.gates.push_back(Gate::oneQubit("ry", q + 1));
    c.gates.push_back(Gate::cz(q, q + 1));
    c.gates.push_back(Gate::oneQubit("ry", q + 1));
    c.gates.push_back(Gate::cz(q, q + 1));
  }
  return c;
}

/// Family dispatcher. A nonzero seed relabels the qubits with a seeded
/// permutation; the gate pattern is unchanged.
inline auto generateCircuit(const std::string& family, size_t numQubits,
                            uint64_t seed = 0, size_t rounds = 1) -> Circuit {
  Circuit c;
  if (family == "ising") {
    c = genIsing(numQubits, rounds);
  } else if (family == "ghz") {
    c = genGhz(numQubits);
  } else if (family == "qft") {
    c = genQftLike(numQubits);
  } else if (family == "wstate") {
    c = genWstate(numQubits);
  } else {
    throw std::invalid_argument("unknown circuit family: " + family);
  }
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::vector<uint32_t> perm(c.numQubits);
    std::iota(perm.begin(), perm.end(), 0U);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (auto& g : c.gates) {
      g.qubits[0] = perm[g.qubits[0]];
      if (g.kind == Gate::Kind::Cz) {
        g.qubits[1] = perm[g.qubits[1]];
      }
    }
  }
  return c;
}

} // namespace zonec
