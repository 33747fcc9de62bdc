#include "ddsgps/pushsum.hpp"

#include "ddsgps/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ddsgps {

std::string_view to_string(StepsizeKind kind) {
  switch (kind) {
    case StepsizeKind::InverseSqrt: return "inverse-sqrt";
    case StepsizeKind::Constant: return "constant";
    case StepsizeKind::Table: return "table";
  }
  return "unknown";
}

StepsizeKind parse_stepsize_kind(std::string_view name) {
  if (name == "inverse-sqrt") return StepsizeKind::InverseSqrt;
  if (name == "constant") return StepsizeKind::Constant;
  if (name == "table") return StepsizeKind::Table;
  throw ConfigError("unknown stepsize kind '" + std::string(name) + "'");
}

StepsizeSchedule::StepsizeSchedule(StepsizeKind kind, double c, std::vector<double> table)
    : kind_(kind), c_(c), table_(std::move(table)) {
  if (kind_ == StepsizeKind::Table) {
    if (table_.empty()) throw ConfigError("stepsize: table must not be empty");
    for (double v : table_) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("stepsize: table entries must be positive and finite");
    }
  } else if (!(c_ > 0.0) || !std::isfinite(c_)) {
    throw ConfigError("stepsize: c must be positive and finite");
  }
}

StepsizeSchedule StepsizeSchedule::inverse_sqrt(double c) { return {StepsizeKind::InverseSqrt, c, {}}; }
StepsizeSchedule StepsizeSchedule::constant(double c) { return {StepsizeKind::Constant, c, {}}; }
StepsizeSchedule StepsizeSchedule::table(std::vector<double> values) {
  return {StepsizeKind::Table, 0.0, std::move(values)};
}

double StepsizeSchedule::at(std::uint64_t t) const {
  if (t == 0) throw ConfigError("stepsize: beta is indexed from t = 1");
  switch (kind_) {
    case StepsizeKind::InverseSqrt: return c_ / std::sqrt(static_cast<double>(t));
    case StepsizeKind::Constant: return c_;
    case StepsizeKind::Table:
      if (t > table_.size()) {
        throw ConfigError("stepsize: table has " + std::to_string(table_.size()) + " entries, round " +
                          std::to_string(t) + " requested");
      }
      return table_[t - 1];
  }
  return c_;
}

std::vector<AgentState> initialize(const ProblemInstance& inst, std::span<const Vector> mu0) {
  inst.validate();
  if (mu0.size() != inst.size()) {
    throw ConfigError("mu0: expected " + std::to_string(inst.size()) + " vectors, got " + std::to_string(mu0.size()));
  }
  std::vector<AgentState> states(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (static_cast<std::size_t>(mu0[i].size()) != inst.coupling_dim) {
      throw ConfigError("mu0: agent " + std::to_string(i + 1) + " has length " + std::to_string(mu0[i].size()) +
                        ", expected " + std::to_string(inst.coupling_dim));
    }
    auto& s = states[i];
    s.mu = mu0[i];
    s.nu = 1.0;
    s.u = mu0[i];
    s.lambda = mu0[i];
    s.x = local_argmin(inst.agents[i], s.lambda);
    s.x_hat = s.x;
    s.lambda_hat = s.lambda;
  }
  return states;
}

std::vector<Vector> zero_mu0(const ProblemInstance& inst) {
  return std::vector<Vector>(inst.size(), Vector::Zero(static_cast<Eigen::Index>(inst.coupling_dim)));
}

std::vector<PushMessage> push_messages(std::span<const AgentState> states, const DigraphSnapshot& snap) {
  if (snap.size() != states.size()) throw ConfigError("push_messages: snapshot size differs from agent count");
  std::vector<std::size_t> degree(snap.size(), 1);
  for (const auto& e : snap.edges()) ++degree[e.from];

  std::vector<PushMessage> out;
  out.reserve(states.size() + snap.edges().size());
  auto emit = [&](std::size_t from, std::size_t to) {
    const double d = static_cast<double>(degree[from]);
    out.push_back({from, to, states[from].mu / d, states[from].nu / d});
  };
  for (std::size_t i = 0; i < states.size(); ++i) emit(i, i);
  for (const auto& e : snap.edges()) emit(e.from, e.to);
  std::sort(out.begin(), out.end(), [](const PushMessage& l, const PushMessage& r) {
    return l.to != r.to ? l.to < r.to : l.from < r.from;
  });
  return out;
}

RoundResult round(std::span<const AgentState> states, const DigraphSnapshot& snap, double beta_next,
                  const ProblemInstance& inst, detail::ParallelFor* pool) {
  const std::size_t m = states.size();
  if (snap.size() != m) throw ConfigError("round: snapshot has " + std::to_string(snap.size()) + " agents, state has " + std::to_string(m));
  if (inst.size() != m) throw ConfigError("round: instance has " + std::to_string(inst.size()) + " agents, state has " + std::to_string(m));
  if (!(beta_next > 0.0)) throw ConfigError("round: stepsize must be positive");

  const WeightMatrix weights = build_weights(snap);
  const auto p = static_cast<Eigen::Index>(inst.coupling_dim);
  std::vector<double> degree(m, 1.0);
  for (const auto& e : snap.edges()) degree[e.from] += 1.0;

  RoundResult result;
  result.beta = beta_next;
  result.states.resize(m);

  // Mixing: sums over senders in ascending index order. The term D_ij mu_j is
  // formed as mu_j / d_j; multiplying by a rounded 1/d_j leaks mass every round.
  for (std::size_t i = 0; i < m; ++i) {
    auto& next = result.states[i];
    next.u = Vector::Zero(p);
    next.nu = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 0.0) continue;
      next.u += states[j].mu / degree[j];
      next.nu += states[j].nu / degree[j];
    }
    if (!(next.nu >= 1e-300)) {
      throw NumericalError("push-sum weight underflow at agent " + std::to_string(i + 1));
    }
  }

  auto local_update = [&](std::size_t i) {
    auto& next = result.states[i];
    const auto& agent = inst.agents[i];
    next.lambda = next.u / next.nu;
    next.x = local_argmin(agent, next.lambda);
    next.mu = next.u + beta_next * subgradient(agent, next.x);
    next.x_hat = states[i].x_hat;
    next.lambda_hat = states[i].lambda_hat;
  };
  if (pool) {
    pool->run(m, local_update);
  } else {
    for (std::size_t i = 0; i < m; ++i) local_update(i);
  }
  return result;
}

AgentState update_running_averages(AgentState state, double beta_next, double cum_beta) {
  if (!(cum_beta > 0.0)) throw ConfigError("running averages: cumulative stepsize must be positive");
  const double weight = beta_next / cum_beta;
  state.x_hat += weight * (state.x - state.x_hat);
  state.lambda_hat += weight * (state.lambda - state.lambda_hat);
  return state;
}

Vector mean_dual(std::span<const AgentState> states) {
  if (states.empty()) return {};
  Vector total = Vector::Zero(states.front().mu.size());
  for (const auto& s : states) total += s.mu;
  return total / static_cast<double>(states.size());
}

Simulation::Simulation(ProblemInstance inst, GraphSchedule sched, StepsizeSchedule stepsize,
                       std::span<const Vector> mu0, SimulationOptions options)
    : inst_(std::move(inst)), sched_(std::move(sched)), stepsize_(std::move(stepsize)), options_(options) {
  if (sched_.size() != inst_.size()) {
    throw ConfigError("schedule has " + std::to_string(sched_.size()) + " agents, problem has " +
                      std::to_string(inst_.size()));
  }
  if (options_.threads > 1) pool_ = std::make_unique<detail::ParallelFor>(options_.threads);
  current_.states = initialize(inst_, mu0);
  mean_dual_ = ddsgps::mean_dual(current_.states);
  previous_mean_dual_ = mean_dual_;
  initial_mean_dual_ = mean_dual_;
  previous_ = current_.states;
}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

const RoundResult& Simulation::step() {
  const std::uint64_t t = current_.t;
  const DigraphSnapshot snap = sched_.snapshot(t);
  const double beta = stepsize_.at(t + 1);
  if (options_.trace_messages) messages_ = push_messages(current_.states, snap);

  RoundResult next = round(current_.states, snap, beta, inst_, pool_.get());
  next.t = t + 1;
  cum_beta_ += beta;
  for (auto& s : next.states) s = update_running_averages(std::move(s), beta, cum_beta_);

  previous_ = std::move(current_.states);
  current_ = std::move(next);
  previous_mean_dual_ = std::move(mean_dual_);
  mean_dual_ = ddsgps::mean_dual(current_.states);
  return current_;
}

}  // namespace ddsgps
