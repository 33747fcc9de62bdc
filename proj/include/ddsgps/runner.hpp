#pragma once

#include "ddsgps/metrics.hpp"

#include <functional>
#include <optional>

namespace ddsgps {

struct RunOptions {
  std::uint64_t iterations = 0;
  /// Early exit once both the consensus spread and the violation norm drop
  /// below their tolerance. Either unset disables the early exit.
  std::optional<double> consensus_tolerance;
  std::optional<double> violation_tolerance;
  SimulationOptions simulation;
  bool keep_records = true;
};

struct RunOutcome {
  std::vector<IterationRecord> records;  // rounds 1..rounds, when kept
  std::vector<AgentState> final_states;
  IterationRecord last;
  std::uint64_t rounds = 0;
  bool early_exit = false;
};

using RoundObserver = std::function<void(const Simulation&, const IterationRecord&)>;

/// Runs up to options.iterations rounds and records one IterationRecord per
/// round. Throws ConfigError for iterations == 0.
RunOutcome run(const ProblemInstance& inst, const GraphSchedule& sched, const StepsizeSchedule& stepsize,
               std::span<const Vector> mu0, const RunOptions& options, const std::optional<OracleResult>& oracle,
               const RoundObserver& observer = {});

}  // namespace ddsgps
