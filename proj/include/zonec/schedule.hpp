#pragma once

#include "zonec/circuit.hpp"

#include <cstdint>
#include <nlohmann/json.hpp>
#include <unordered_set>
#include <vector>

namespace zonec {

struct Layer {
  enum class Kind : uint8_t { OneQubit, TwoQubit };
  Kind kind = Kind::OneQubit;
  std::vector<Gate> gates;
};

/**
 * Alternating one-/two-qubit gate layers, starting with a (possibly empty)
 * one-qubit layer. Two-qubit layers are pairwise qubit-disjoint and never
 * empty; a trailing one-qubit layer is kept only if it has gates.
 */
struct Schedule {
  std::vector<Layer> layers;

  [[nodiscard]] auto twoQubitLayers() const
      -> std::vector<const Layer*> {
    std::vector<const Layer*> out;
    for (const auto& l : layers) {
      if (l.kind == Layer::Kind::TwoQubit) {
        out.push_back(&l);
      }
    }
    return out;
  }
  [[nodiscard]] auto numTwoQubitLayers() const -> size_t {
    size_t n = 0;
    for (const auto& l : layers) {
      n += l.kind == Layer::Kind::TwoQubit ? 1 : 0;
    }
    return n;
  }
  [[nodiscard]] auto maxTwoQubitGatesPerLayer() const -> size_t {
    size_t n = 0;
    for (const auto& l : layers) {
      if (l.kind == Layer::Kind::TwoQubit) {
        n = std::max(n, l.gates.size());
      }
    }
    return n;
  }
};

/// Atoms reusable across each boundary between consecutive two-qubit layers:
/// marks[k] holds the operands shared by two-qubit layers k and k+1.
struct ReuseMarks {
  std::vector<std::unordered_set<uint32_t>> marks;

  [[nodiscard]] auto at(size_t boundary) const
      -> const std::unordered_set<uint32_t>& {
    static const std::unordered_set<uint32_t> empty;
    return boundary < marks.size() ? marks[boundary] : empty;
  }
};

/**
 * Greedy as-soon-as-possible layering. Positions alternate: one-qubit layer
 * j sits at 2j, two-qubit layer j at 2j+1. Each gate takes the earliest
 * position of its kind at or after the first position free on all operands.
 * One-qubit gates leave their position open for further one-qubit gates on
 * the same qubit (they execute as an ordered batch); gates in a two-qubit
 * layer must be disjoint, so a placed cz bumps its operands past the layer.
 */
inline auto scheduleAsap(const Circuit& circuit) -> Schedule {
  std::vector<size_t> nextFree(circuit.numQubits, 0);
  std::vector<Layer> oneQ;
  std::vector<Layer> twoQ;

  for (const auto& gate : circuit.gates) {
    size_t earliest = 0;
    for (size_t i = 0; i < gate.numOperands(); ++i) {
      earliest = std::max(earliest, nextFree[gate.qubits[i]]);
    }
    if (gate.kind == Gate::Kind::Cz) {
      const size_t pos = earliest % 2 == 1 ? earliest : earliest + 1;
      const size_t layerIdx = pos / 2;
      if (twoQ.size() <= layerIdx) {
        twoQ.resize(layerIdx + 1, Layer{Layer::Kind::TwoQubit, {}});
      }
      twoQ[layerIdx].gates.push_back(gate);
      nextFree[gate.qubits[0]] = pos + 1;
      nextFree[gate.qubits[1]] = pos + 1;
    } else {
      const size_t pos = earliest % 2 == 0 ? earliest : earliest + 1;
      const size_t layerIdx = pos / 2;
      if (oneQ.size() <= layerIdx) {
        oneQ.resize(layerIdx + 1, Layer{Layer::Kind::OneQubit, {}});
      }
      oneQ[layerIdx].gates.push_back(gate);
      nextFree[gate.qubits[0]] = pos;
    }
  }

  Schedule schedule;
  const size_t rounds = std::max(oneQ.size(), twoQ.size());
  for (size_t i = 0; i < rounds; ++i) {
    schedule.layers.push_back(i < oneQ.size()
                                  ? std::move(oneQ[i])
                                  : Layer{Layer::Kind::OneQubit, {}});
    if (i < twoQ.size()) {
      schedule.layers.push_back(std::move(twoQ[i]));
    }
  }
  // drop a trailing empty one-qubit layer
  if (!schedule.layers.empty() &&
      schedule.layers.back().kind == Layer::Kind::OneQubit &&
      schedule.layers.back().gates.empty()) {
    schedule.layers.pop_back();
  }
  return schedule;
}

/// Marks exactly the atoms appearing in both layers of each consecutive
/// two-qubit layer pair. One-qubit gates in between do not block a mark;
/// reuse stays a placement option the placer may decline.
inline auto analyzeReuse(const Schedule& schedule) -> ReuseMarks {
  const auto layers = schedule.twoQubitLayers();
  ReuseMarks marks;
  if (layers.size() < 2) {
    return marks;
  }
  marks.marks.resize(layers.size() - 1);
  for (size_t k = 0; k + 1 < layers.size(); ++k) {
    std::unordered_set<uint32_t> current;
    for (const auto& g : layers[k]->gates) {
      current.insert(g.qubits[0]);
      current.insert(g.qubits[1]);
    }
    for (const auto& g : layers[k + 1]->gates) {
      for (const uint32_t q : {g.qubits[0], g.qubits[1]}) {
        if (current.contains(q)) {
          marks.marks[k].insert(q);
        }
      }
    }
  }
  return marks;
}

inline auto scheduleToJson(const Schedule& schedule) -> nlohmann::json {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : schedule.layers) {
    nlohmann::json lj;
    lj["kind"] = l.kind == Layer::Kind::TwoQubit ? "2q" : "1q";
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : l.gates) {
      if (g.kind == Gate::Kind::Cz) {
        gates.push_back({{"kind", "cz"}, {"operands", {g.qubits[0], g.qubits[1]}}});
      } else {
        gates.push_back(
            {{"kind", "1q"}, {"name", g.name}, {"operands", {g.qubits[0]}}});
      }
    }
    lj["gates"] = std::move(gates);
    layers.push_back(std::move(lj));
  }
  return {{"layers", std::move(layers)}};
}

inline auto reuseMarksToJson(const ReuseMarks& marks) -> nlohmann::json {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : marks.marks) {
    std::vector<uint32_t> sorted(m.begin(), m.end());
    std::sort(sorted.begin(), sorted.end());
    out.push_back(sorted);
  }
  return out;
}

} // namespace zonec
