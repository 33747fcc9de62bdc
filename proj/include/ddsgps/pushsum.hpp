#pragma once

// Distributed dual subgradient iteration with push-sum mixing over a
// time-varying directed graph. Rounds are synchronous: every agent reads only
// the previous round's (mu, nu) and then updates its own state.

#include "ddsgps/graph.hpp"
#include "ddsgps/problem.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace ddsgps {

namespace detail {
class ParallelFor;
}

struct AgentState {
  Vector mu;          // dual mass
  double nu = 1.0;    // push-sum weight
  Vector u;           // mixed dual mass
  Vector lambda;      // u / nu
  Vector x;           // primal iterate
  Vector x_hat;       // beta-weighted running average of x
  Vector lambda_hat;  // beta-weighted running average of lambda
};

enum class StepsizeKind { InverseSqrt, Constant, Table };

std::string_view to_string(StepsizeKind kind);
StepsizeKind parse_stepsize_kind(std::string_view name);

/// beta[t] for t >= 1.
class StepsizeSchedule {
 public:
  static StepsizeSchedule inverse_sqrt(double c);
  static StepsizeSchedule constant(double c);
  static StepsizeSchedule table(std::vector<double> values);

  StepsizeKind kind() const { return kind_; }
  double c() const { return c_; }
  const std::vector<double>& values() const { return table_; }

  double at(std::uint64_t t) const;

  /// Whether the schedule provably meets sum beta = inf, sum beta^2 < inf and
  /// monotone decay. Only inverse-sqrt does; constant and finite tables do not.
  bool satisfies_decay_conditions() const { return kind_ == StepsizeKind::InverseSqrt; }

 private:
  StepsizeSchedule(StepsizeKind kind, double c, std::vector<double> table);

  StepsizeKind kind_;
  double c_;
  std::vector<double> table_;
};

/// Agent states at round 0: nu = 1, u = lambda = mu0, x = local argmin at
/// mu0, running averages equal to the current iterates.
std::vector<AgentState> initialize(const ProblemInstance& inst, std::span<const Vector> mu0);

/// Zero initial dual mass for every agent.
std::vector<Vector> zero_mu0(const ProblemInstance& inst);

/// One push (mu_j / d_j, nu_j / d_j) from sender to receiver.
struct PushMessage {
  std::size_t from = 0;
  std::size_t to = 0;
  Vector mu_share;
  double nu_share = 0.0;
};

/// The messages sent in a round, ordered by (receiver, sender).
std::vector<PushMessage> push_messages(std::span<const AgentState> states, const DigraphSnapshot& snap);

struct RoundResult {
  std::uint64_t t = 0;  // index of the states held (t+1 after a step from t)
  double beta = 0.0;    // beta[t] used to produce them
  std::vector<AgentState> states;
};

/// Steps (a)-(e) of one synchronous round; running averages are untouched.
/// Throws NumericalError when a push-sum weight drops below 1e-300.
RoundResult round(std::span<const AgentState> states, const DigraphSnapshot& snap, double beta_next,
                  const ProblemInstance& inst, detail::ParallelFor* pool = nullptr);

/// x_hat += (beta/cum_beta)(x - x_hat), and the same for lambda_hat.
AgentState update_running_averages(AgentState state, double beta_next, double cum_beta);

/// Mean dual mass (1/m) sum_i mu_i, accumulated in agent order.
Vector mean_dual(std::span<const AgentState> states);

struct SimulationOptions {
  unsigned threads = 1;
  bool trace_messages = false;
};

/// Stateful driver: owns the problem, schedule and current round.
class Simulation {
 public:
  Simulation(ProblemInstance inst, GraphSchedule sched, StepsizeSchedule stepsize, std::span<const Vector> mu0,
             SimulationOptions options = {});
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  /// Advances from round t to t+1, including the running averages.
  const RoundResult& step();

  const ProblemInstance& instance() const { return inst_; }
  const GraphSchedule& schedule() const { return sched_; }
  const StepsizeSchedule& stepsize() const { return stepsize_; }

  std::uint64_t t() const { return current_.t; }
  double beta() const { return current_.beta; }
  /// sum_{r=1}^{t} beta[r]
  double cumulative_beta() const { return cum_beta_; }
  std::span<const AgentState> states() const { return current_.states; }
  std::span<const AgentState> previous_states() const { return previous_; }

  const Vector& mean_dual() const { return mean_dual_; }
  const Vector& previous_mean_dual() const { return previous_mean_dual_; }
  const Vector& initial_mean_dual() const { return initial_mean_dual_; }

  /// Messages of the last step; empty unless trace_messages is set.
  const std::vector<PushMessage>& last_messages() const { return messages_; }

 private:
  ProblemInstance inst_;
  GraphSchedule sched_;
  StepsizeSchedule stepsize_;
  SimulationOptions options_;
  std::unique_ptr<detail::ParallelFor> pool_;
  RoundResult current_;
  std::vector<AgentState> previous_;
  double cum_beta_ = 0.0;
  Vector mean_dual_;
  Vector previous_mean_dual_;
  Vector initial_mean_dual_;
  std::vector<PushMessage> messages_;
};

}  // namespace ddsgps
