#pragma once

#include "zonec/arch.hpp"
#include "zonec/circuit.hpp"
#include "zonec/placer.hpp"
#include "zonec/router.hpp"
#include "zonec/schedule.hpp"

#include <cmath>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace zonec {

struct ProgramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat, zone-explicit target instruction.
struct Instruction {
  enum class Kind : uint8_t { Pickup, Move, Drop, RydbergPulse, OneQubitBatch };

  Kind kind = Kind::RydbergPulse;
  std::vector<uint32_t> atoms;                      ///< pickup/drop batch
  Vec2 displacement;                                ///< move: largest delta
  double durationUs = 0.0;                          ///< move
  std::vector<std::pair<uint32_t, Vec2>> targets;   ///< move: atom endpoints
  std::vector<Gate> gates;                          ///< one-qubit batch
};

struct Metrics {
  double placementTimeMs = 0.0; ///< wall clock of the placement stage
  double routingTimeMs = 0.0;   ///< wall clock of the routing stage
  size_t rearrangementSteps = 0;
  double rearrangementTimeMs = 0.0; ///< physical rearrangement duration
  size_t trapTransfers = 0;         ///< counted per transfer batch
};

struct Program {
  std::vector<Instruction> instructions;
  std::vector<double> perStepTimesUs;
  Metrics totals;
};

/// Gate durations enter the program timeline but stay out of the
/// rearrangement-time metric unless requested.
struct EmitOptions {
  double rydbergPulseUs = 0.0;
  double oneQubitBatchUs = 0.0;
  bool includeGateTimesInRearrangement = false;
};

/// Duration of one straight-line move over d micrometers: sqrt(d / a),
/// d in meters, result in seconds.
inline auto movementTimeS(double distUm, const Architecture& arch) -> double {
  if (distUm < 0) {
    throw ProgramError("movement distance must be nonnegative");
  }
  return std::sqrt(distUm * 1e-6 / arch.accelerationMps2());
}

/// One transfer time per pickup/drop batch plus the move at the step's
/// maximum distance; seconds.
inline auto stepTimeS(const RearrangementStep& step, const Architecture& arch)
    -> double {
  const auto transfers =
      static_cast<double>(step.pickupBatches.size() + step.dropBatches.size());
  return transfers * arch.trapTransferTimeUs() * 1e-6 +
         movementTimeS(step.maxDist, arch);
}

/**
 * Weaves schedule, placements, and routes into the instruction stream:
 * per two-qubit layer, the preceding one-qubit batch, the rearrangement
 * steps into the gate placement, the Rydberg pulse, and the steps back.
 * Placements run [initial, gate 0, intermediate 0, gate 1, ...]; routes
 * cover each consecutive placement pair.
 */
inline auto emit(const Schedule& schedule, std::span<const Placement> placements,
                 std::span<const Route> routes, const Architecture& arch,
                 const EmitOptions& options = {}) -> Program {
  const size_t n2q = schedule.numTwoQubitLayers();
  if (placements.size() != 2 * n2q + 1 || routes.size() != 2 * n2q) {
    throw ProgramError("placements/routes do not cover every transition: "
                       "expected " +
                       std::to_string(2 * n2q + 1) + " placements and " +
                       std::to_string(2 * n2q) + " routes");
  }
  Program program;
  auto emitOneQubit = [&](const Layer& layer) {
    if (layer.gates.empty()) {
      return;
    }
    Instruction in;
    in.kind = Instruction::Kind::OneQubitBatch;
    in.gates = layer.gates;
    in.durationUs = options.oneQubitBatchUs;
    program.instructions.push_back(std::move(in));
  };
  auto emitRoute = [&](const Route& route) {
    for (const auto& step : route.steps) {
      for (const auto& batch : step.pickupBatches) {
        Instruction in;
        in.kind = Instruction::Kind::Pickup;
        in.atoms = batch;
        program.instructions.push_back(std::move(in));
      }
      Instruction move;
      move.kind = Instruction::Kind::Move;
      double maxDist = 0.0;
      for (const auto& m : step.movements) {
        move.targets.emplace_back(m.atom, m.to);
        if (m.dist >= maxDist) {
          maxDist = m.dist;
          move.displacement = m.to - m.from;
        }
      }
      move.durationUs = movementTimeS(step.maxDist, arch) * 1e6;
      program.instructions.push_back(std::move(move));
      for (const auto& batch : step.dropBatches) {
        Instruction in;
        in.kind = Instruction::Kind::Drop;
        in.atoms = batch;
        program.instructions.push_back(std::move(in));
      }
      program.perStepTimesUs.push_back(stepTimeS(step, arch) * 1e6);
      program.totals.rearrangementSteps += 1;
      program.totals.trapTransfers +=
          step.pickupBatches.size() + step.dropBatches.size();
    }
  };

  size_t routeIdx = 0;
  for (const auto& layer : schedule.layers) {
    if (layer.kind == Layer::Kind::OneQubit) {
      emitOneQubit(layer);
      continue;
    }
    emitRoute(routes[routeIdx++]);
    Instruction pulse;
    pulse.kind = Instruction::Kind::RydbergPulse;
    pulse.durationUs = options.rydbergPulseUs;
    program.instructions.push_back(std::move(pulse));
    emitRoute(routes[routeIdx++]);
  }

  double totalUs = 0.0;
  for (const double t : program.perStepTimesUs) {
    totalUs += t;
  }
  if (options.includeGateTimesInRearrangement) {
    for (const auto& in : program.instructions) {
      if (in.kind == Instruction::Kind::RydbergPulse ||
          in.kind == Instruction::Kind::OneQubitBatch) {
        totalUs += in.durationUs;
      }
    }
  }
  program.totals.rearrangementTimeMs = totalUs * 1e-3;
  return program;
}

inline auto metricsToJson(const Metrics& m) -> nlohmann::json {
  return {{"placement_time_ms", m.placementTimeMs},
          {"routing_time_ms", m.routingTimeMs},
          {"rearrangement_steps", m.rearrangementSteps},
          {"rearrangement_time_ms", m.rearrangementTimeMs},
          {"trap_transfers", m.trapTransfers}};
}

inline auto programToJson(const Program& program) -> nlohmann::json {
  nlohmann::json instructions = nlohmann::json::array();
  for (const auto& in : program.instructions) {
    nlohmann::json ij;
    switch (in.kind) {
    case Instruction::Kind::Pickup:
      ij["kind"] = "pickup";
      ij["atoms"] = in.atoms;
      break;
    case Instruction::Kind::Drop:
      ij["kind"] = "drop";
      ij["atoms"] = in.atoms;
      break;
    case Instruction::Kind::Move: {
      ij["kind"] = "move";
      ij["displacement"] = {in.displacement.x, in.displacement.y};
      ij["duration_us"] = in.durationUs;
      nlohmann::json targets = nlohmann::json::object();
      for (const auto& [atom, pos] : in.targets) {
        targets[std::to_string(atom)] = {pos.x, pos.y};
      }
      ij["targets"] = std::move(targets);
      break;
    }
    case Instruction::Kind::RydbergPulse:
      ij["kind"] = "rydberg_pulse";
      ij["duration_us"] = in.durationUs;
      break;
    case Instruction::Kind::OneQubitBatch: {
      ij["kind"] = "one_qubit_batch";
      ij["duration_us"] = in.durationUs;
      nlohmann::json gates = nlohmann::json::array();
      for (const auto& g : in.gates) {
        gates.push_back({{"name", g.name}, {"qubit", g.qubits[0]}});
      }
      ij["gates"] = std::move(gates);
      break;
    }
    }
    instructions.push_back(std::move(ij));
  }
  return {{"instructions", std::move(instructions)},
          {"per_step_times_us", program.perStepTimesUs},
          {"metrics", metricsToJson(program.totals)}};
}

/// Animation trace: the full atom position map after every instruction.
inline auto traceJson(const Program& program, const Placement& initial,
                      const Architecture& arch) -> nlohmann::json {
  std::vector<Vec2> pos;
  pos.reserve(initial.numAtoms());
  for (const auto& trap : initial.assignment) {
    pos.push_back(arch.trapPosition(trap));
  }
  auto frame = [&pos](const std::string& kind) {
    nlohmann::json positions = nlohmann::json::object();
    for (size_t a = 0; a < pos.size(); ++a) {
      positions[std::to_string(a)] = {pos[a].x, pos[a].y};
    }
    return nlohmann::json{{"instruction", kind},
                          {"positions", std::move(positions)}};
  };
  nlohmann::json frames = nlohmann::json::array();
  frames.push_back(frame("initial"));
  for (const auto& in : program.instructions) {
    switch (in.kind) {
    case Instruction::Kind::Move:
      for (const auto& [atom, target] : in.targets) {
        pos[atom] = target;
      }
      frames.push_back(frame("move"));
      break;
    case Instruction::Kind::Pickup:
      frames.push_back(frame("pickup"));
      break;
    case Instruction::Kind::Drop:
      frames.push_back(frame("drop"));
      break;
    case Instruction::Kind::RydbergPulse:
      frames.push_back(frame("rydberg_pulse"));
      break;
    case Instruction::Kind::OneQubitBatch:
      frames.push_back(frame("one_qubit_batch"));
      break;
    }
  }
  return {{"frames", std::move(frames)}};
}

} // namespace zonec
