#pragma once

#include "zonec/pipeline.hpp"

#include <cmath>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace zonec {

namespace detail {

/// FNV-1a over the serialized schedule and reuse marks; both placers must
/// consume identical inputs, which the compare harness asserts by hash.
inline auto scheduleHash(const Schedule& schedule, const ReuseMarks& marks)
    -> uint64_t {
  const std::string text =
      scheduleToJson(schedule).dump() + reuseMarksToJson(marks).dump();
  uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Whole percent, rounded half away from zero.
inline auto deltaPercent(double aware, double agnostic) -> int64_t {
  if (agnostic == 0.0) {
    return 0;
  }
  return std::llround((aware - agnostic) / agnostic * 100.0);
}

} // namespace detail

/// One row of the comparison table.
struct RunReport {
  std::string benchmark;
  size_t qubits = 0;
  size_t twoQubitGates = 0;
  size_t layers = 0;
  size_t maxGatesPerLayer = 0;
  Metrics aware;
  Metrics agnostic;
  int64_t stepsDeltaPercent = 0;
  int64_t timeDeltaPercent = 0;
  bool failed = false;
  std::string error;
};

struct CompareInput {
  std::string name;
  Circuit circuit;
};

inline auto runComparison(const std::vector<CompareInput>& circuits,
                          const Architecture& arch, const PlacerParams& params,
                          const EmitOptions& emitOptions = {})
    -> std::vector<RunReport> {
  std::vector<RunReport> reports;
  reports.reserve(circuits.size());
  for (const auto& [name, circuit] : circuits) {
    RunReport report;
    report.benchmark = name;
    report.qubits = circuit.numQubits;
    try {
      CompileOptions aware{params, PlacerKind::Aware, emitOptions};
      CompileOptions agnostic{params, PlacerKind::Baseline, emitOptions};
      const auto awareResult = compile(circuit, arch, aware);
      const auto agnosticResult = compile(circuit, arch, agnostic);
      if (detail::scheduleHash(awareResult.schedule, awareResult.marks) !=
          detail::scheduleHash(agnosticResult.schedule,
                               agnosticResult.marks)) {
        throw std::logic_error("placers consumed diverging schedules");
      }
      size_t cz = 0;
      for (const auto& g : circuit.gates) {
        cz += g.kind == Gate::Kind::Cz ? 1 : 0;
      }
      report.twoQubitGates = cz;
      report.layers = awareResult.schedule.numTwoQubitLayers();
      report.maxGatesPerLayer =
          awareResult.schedule.maxTwoQubitGatesPerLayer();
      report.aware = awareResult.program.totals;
      report.agnostic = agnosticResult.program.totals;
      report.stepsDeltaPercent = detail::deltaPercent(
          static_cast<double>(report.aware.rearrangementSteps),
          static_cast<double>(report.agnostic.rearrangementSteps));
      report.timeDeltaPercent = detail::deltaPercent(
          report.aware.rearrangementTimeMs,
          report.agnostic.rearrangementTimeMs);
    } catch (const std::exception& e) {
      report.failed = true;
      report.error = e.what();
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

inline auto reportsToJson(const std::vector<RunReport>& reports)
    -> nlohmann::json {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json row = {{"benchmark", r.benchmark},
                          {"qubits", r.qubits},
                          {"two_qubit_gates", r.twoQubitGates},
                          {"layers", r.layers},
                          {"max_gates_per_layer", r.maxGatesPerLayer},
                          {"failed", r.failed}};
    if (r.failed) {
      row["error"] = r.error;
    } else {
      row["agnostic"] = metricsToJson(r.agnostic);
      row["aware"] = metricsToJson(r.aware);
      row["steps_delta_percent"] = r.stepsDeltaPercent;
      row["time_delta_percent"] = r.timeDeltaPercent;
    }
    rows.push_back(std::move(row));
  }
  return {{"circuits", std::move(rows)}};
}

/// Aligned text table mirroring the JSON report.
inline auto reportsToTable(const std::vector<RunReport>& reports)
    -> std::string {
  std::ostringstream out;
  auto row = [&](const std::string& a, const std::string& b,
                 const std::string& c, const std::string& d,
                 const std::string& e, const std::string& f,
                 const std::string& g, const std::string& h,
                 const std::string& i, const std::string& j) {
    out << a;
    out.width(0);
    auto pad = [&](const std::string& s, int w) {
      out << std::string(w > static_cast<int>(s.size())
                             ? static_cast<size_t>(w) - s.size()
                             : 1,
                         ' ')
          << s;
    };
    pad(b, 8);
    pad(c, 10);
    pad(d, 8);
    pad(e, 10);
    pad(f, 12);
    pad(g, 14);
    pad(h, 12);
    pad(i, 14);
    pad(j, 10);
    out << "\n";
  };
  row("benchmark", "qubits", "2q-gates", "layers", "max-2q",
      "agn-steps", "agn-time-ms", "aw-steps", "aw-time-ms", "delta");
  for (const auto& r : reports) {
    if (r.failed) {
      row(r.benchmark, "-", "-", "-", "-", "-", "-", "-", "-", "failed");
      continue;
    }
    auto ms = [](double v) {
      std::ostringstream s;
      s.setf(std::ios::fixed);
      s.precision(3);
      s << v;
      return s.str();
    };
    row(r.benchmark, std::to_string(r.qubits), std::to_string(r.twoQubitGates),
        std::to_string(r.layers), std::to_string(r.maxGatesPerLayer),
        std::to_string(r.agnostic.rearrangementSteps),
        ms(r.agnostic.rearrangementTimeMs),
        std::to_string(r.aware.rearrangementSteps),
        ms(r.aware.rearrangementTimeMs),
        std::to_string(r.timeDeltaPercent) + "%");
  }
  return out.str();
}

struct ParamScanRow {
  PlacerParams params;
  size_t totalSteps = 0;
  double totalRearrangementTimeMs = 0.0;
  double meanPlacementTimeMs = 0.0;
  size_t failures = 0;
};

inline auto runParamScan(const std::vector<CompareInput>& circuits,
                         const Architecture& arch,
                         const std::vector<PlacerParams>& grid)
    -> std::vector<ParamScanRow> {
  std::vector<ParamScanRow> rows;
  rows.reserve(grid.size());
  for (const auto& params : grid) {
    ParamScanRow row;
    row.params = params;
    double placementMs = 0.0;
    size_t ok = 0;
    for (const auto& [name, circuit] : circuits) {
      try {
        const auto result =
            compile(circuit, arch, {params, PlacerKind::Aware, {}});
        row.totalSteps += result.program.totals.rearrangementSteps;
        row.totalRearrangementTimeMs +=
            result.program.totals.rearrangementTimeMs;
        placementMs += result.program.totals.placementTimeMs;
        ++ok;
      } catch (const std::exception&) {
        ++row.failures;
      }
    }
    row.meanPlacementTimeMs = ok > 0 ? placementMs / static_cast<double>(ok)
                                     : 0.0;
    rows.push_back(row);
  }
  return rows;
}

inline auto paramScanToJson(const std::vector<ParamScanRow>& rows)
    -> nlohmann::json {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"alpha", r.params.alpha},
                   {"beta", r.params.beta},
                   {"gamma", r.params.gamma},
                   {"delta", r.params.delta},
                   {"total_rearrangement_steps", r.totalSteps},
                   {"total_rearrangement_time_ms", r.totalRearrangementTimeMs},
                   {"mean_placement_time_ms", r.meanPlacementTimeMs},
                   {"failures", r.failures}});
  }
  return out;
}

} // namespace zonec
