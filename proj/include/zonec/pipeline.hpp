#pragma once

#include "zonec/arch.hpp"
#include "zonec/circuit.hpp"
#include "zonec/placer.hpp"
#include "zonec/program.hpp"
#include "zonec/router.hpp"
#include "zonec/schedule.hpp"

#include <chrono>
#include <cstdint>
#include <vector>

namespace zonec {

enum class PlacerKind : uint8_t { Aware, Baseline };

struct CompileOptions {
  PlacerParams params;
  PlacerKind placer = PlacerKind::Aware;
  EmitOptions emit;
};

struct CompileResult {
  Schedule schedule;
  ReuseMarks marks;
  std::vector<Placement> placements;
  std::vector<Route> routes;
  Program program;
  bool anyBudgetExhausted = false;
};

/**
 * The full flow: schedule, reuse marks, initial placement, then per
 * two-qubit layer a gate placement and an intermediate placement, routing
 * between each consecutive pair, and finally code generation. Wall-clock
 * metrics cover the placement and routing stages separately.
 */
inline auto compile(const Circuit& circuit, const Architecture& arch,
                    const CompileOptions& options) -> CompileResult {
  using Clock = std::chrono::steady_clock;
  CompileResult result;
  result.schedule = scheduleAsap(circuit);
  result.marks = analyzeReuse(result.schedule);
  const auto twoQ = result.schedule.twoQubitLayers();

  const auto placementStart = Clock::now();
  result.placements.push_back(placeInitial(circuit.numQubits, arch));
  for (size_t k = 0; k < twoQ.size(); ++k) {
    NextLayerInfo next;
    if (k + 1 < twoQ.size()) {
      next.gates = twoQ[k + 1]->gates;
      next.reuseMarks = result.marks.at(k);
    }
    const Placement& prev = result.placements.back();
    // atoms still parked in the entanglement zone from the previous layer
    const auto& reuseIn = prev.reused;
    if (options.placer == PlacerKind::Aware) {
      auto gate = placeGateLayer(prev, *twoQ[k], reuseIn, next, arch,
                                 options.params);
      result.anyBudgetExhausted |= gate.budgetExhausted || gate.fellBack;
      result.placements.push_back(std::move(gate.placement));
      auto inter = placeIntermediate(result.placements.back(), next, arch,
                                     options.params);
      result.anyBudgetExhausted |= inter.budgetExhausted || inter.fellBack;
      result.placements.push_back(std::move(inter.placement));
    } else {
      result.placements.push_back(
          placeBaselineGateLayer(prev, *twoQ[k], reuseIn, arch));
      result.placements.push_back(placeBaselineIntermediate(
          result.placements.back(), next.reuseMarks, arch));
    }
  }
  const auto placementEnd = Clock::now();

  result.routes.reserve(result.placements.size() - 1);
  for (size_t i = 0; i + 1 < result.placements.size(); ++i) {
    result.routes.push_back(
        routeTransition(result.placements[i], result.placements[i + 1], arch));
  }
  const auto routingEnd = Clock::now();

  result.program = emit(result.schedule, result.placements, result.routes,
                        arch, options.emit);
  result.program.totals.placementTimeMs =
      std::chrono::duration<double, std::milli>(placementEnd - placementStart)
          .count();
  result.program.totals.routingTimeMs =
      std::chrono::duration<double, std::milli>(routingEnd - placementEnd)
          .count();
  return result;
}

} // namespace zonec
