#include "ddsgps/runner.hpp"

#include "ddsgps/errors.hpp"

namespace ddsgps {

RunOutcome run(const ProblemInstance& inst, const GraphSchedule& sched, const StepsizeSchedule& stepsize,
               std::span<const Vector> mu0, const RunOptions& options, const std::optional<OracleResult>& oracle,
               const RoundObserver& observer) {
  if (options.iterations == 0) throw ConfigError("iterations: must be at least 1");
  Simulation sim(inst, sched, stepsize, mu0, options.simulation);
  const Recorder recorder(sim.instance(), oracle);

  RunOutcome out;
  if (options.keep_records) out.records.reserve(options.iterations);
  const bool early_exit_enabled = options.consensus_tolerance && options.violation_tolerance;
  for (std::uint64_t k = 0; k < options.iterations; ++k) {
    sim.step();
    IterationRecord rec = recorder.record(view_of(sim));
    if (observer) observer(sim, rec);
    out.rounds = sim.t();
    const bool done = early_exit_enabled && rec.consensus_spread < *options.consensus_tolerance &&
                      rec.violation_norm < *options.violation_tolerance;
    if (options.keep_records) out.records.push_back(rec);
    out.last = std::move(rec);
    if (done) {
      out.early_exit = true;
      break;
    }
  }
  out.final_states.assign(sim.states().begin(), sim.states().end());
  return out;
}

}  // namespace ddsgps
