#include "ddsgps/metrics.hpp"

#include "ddsgps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>

namespace ddsgps {

RoundView view_of(const Simulation& sim) {
  RoundView v;
  v.t = sim.t();
  v.beta = sim.beta();
  v.cumulative_beta = sim.cumulative_beta();
  v.states = sim.states();
  v.previous_states = sim.previous_states();
  v.mean_dual = sim.mean_dual();
  v.previous_mean_dual = sim.previous_mean_dual();
  v.initial_mean_dual = sim.initial_mean_dual();
  return v;
}

Recorder::Recorder(const ProblemInstance& inst, std::optional<OracleResult> oracle)
    : inst_(&inst), oracle_(std::move(oracle)) {
  for (const auto& agent : inst.agents) {
    bounds_.push_back(subgradient_bound(agent));
    total_bound_ += bounds_.back();
  }
}

namespace {

double relative(double diff, double scale) {
  if (diff == 0.0) return 0.0;
  return scale > 0.0 ? diff / scale : diff;
}

double max_abs(std::initializer_list<double> values) {
  double out = 0.0;
  for (double v : values) out = std::max(out, std::abs(v));
  return out;
}

}  // namespace

IterationRecord Recorder::record(const RoundView& round) const {
  const auto& inst = *inst_;
  const std::size_t m = inst.size();
  if (round.states.size() != m) throw ConfigError("record: state count differs from agent count");
  const double md = static_cast<double>(m);
  const auto p = static_cast<Eigen::Index>(inst.coupling_dim);

  IterationRecord r;
  r.t = round.t;
  r.beta = round.beta;
  r.mean_dual = round.mean_dual;

  PrimalPoint x_hat, x_now;
  x_hat.reserve(m);
  x_now.reserve(m);
  for (const auto& s : round.states) {
    x_hat.push_back(s.x_hat);
    x_now.push_back(s.x);
  }
  r.objective_hat = evaluate_objective(inst, x_hat);

  Vector violation = Vector::Zero(p);
  double violation_scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& agent = inst.agents[i];
    const Vector ax = agent.coupling_matrix * x_hat[i];
    violation += ax - agent.coupling_offset;
    violation_scale += ax.norm() + agent.coupling_offset.norm();
  }
  r.violation_norm = violation.norm();

  for (std::size_t i = 0; i < m; ++i) {
    r.nu_sum += round.states[i].nu;
    for (std::size_t j = i + 1; j < m; ++j) {
      r.consensus_spread = std::max(r.consensus_spread, (round.states[i].lambda - round.states[j].lambda).norm());
    }
  }

  if (round.t > 0) {
    // Constraint-violation identity.
    const Vector predicted = md * (round.mean_dual - round.initial_mean_dual) / round.cumulative_beta;
    const double scale = std::max(violation_scale, md * (round.mean_dual.norm() + round.initial_mean_dual.norm()) /
                                                       round.cumulative_beta);
    r.identity_residual = relative((violation - predicted).norm(), scale);

    // Mean-dual recursion.
    Vector pushed = Vector::Zero(p);
    double pushed_scale = 0.0, mass_scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Vector g = subgradient(inst.agents[i], x_now[i]);
      pushed += g;
      pushed_scale += g.norm();
      mass_scale += round.states[i].mu.norm() + round.previous_states[i].mu.norm();
    }
    const Vector expected = round.previous_mean_dual + (round.beta / md) * pushed;
    r.mean_dual_residual =
        relative((round.mean_dual - expected).norm(), (mass_scale + round.beta * pushed_scale) / md);

    for (const auto& s : round.states) {
      r.push_deviation = std::max(r.push_deviation, (s.lambda - round.previous_mean_dual).norm());
    }
  }

  if (oracle_) {
    const auto& o = *oracle_;
    r.objective_gap = r.objective_hat - o.f_star;
    double distance = 0.0;
    for (const auto& s : round.states) distance = std::max(distance, (s.lambda - o.lambda_star).norm());
    r.dual_distance = distance;

    if (round.t > 0) {
      const double beta = round.beta;
      const double lhs = (round.mean_dual - o.lambda_star).squaredNorm();
      const double start = (round.previous_mean_dual - o.lambda_star).squaredNorm();
      double consensus_term = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        consensus_term += bounds_[i] * (round.states[i].lambda - round.previous_mean_dual).norm();
      }
      consensus_term *= 4.0 * beta / md;
      const double noise_term = total_bound_ * total_bound_ / (md * md) * beta * beta;
      const double l_now = evaluate_lagrangian(inst, x_now, o.lambda_star);
      const double l_star = evaluate_lagrangian(inst, o.x_star, round.previous_mean_dual);
      const double descent = 2.0 * beta / md * (l_now - l_star);
      const double rhs = start + consensus_term + noise_term - descent;
      const double scale = std::max(1.0, max_abs({lhs, start, consensus_term, noise_term, descent,
                                                  2.0 * beta / md * l_now, 2.0 * beta / md * l_star}));
      r.descent_margin = (rhs - lhs) / scale;
    }
  }
  return r;
}

BoundInputs make_bound_inputs(const ProblemInstance& inst, std::span<const Vector> mu0, double c, double xi,
                              double one_minus_eta) {
  BoundInputs in;
  in.c = c;
  in.m = inst.size();
  in.p = inst.coupling_dim;
  for (const auto& agent : inst.agents) in.G += subgradient_bound(agent);
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(inst.coupling_dim));
  for (const auto& v : mu0) {
    in.mu0_l1_sum += v.lpNorm<1>();
    mean += v;
  }
  if (!mu0.empty()) mean /= static_cast<double>(mu0.size());
  in.mu0_l1_mean = mean.lpNorm<1>();
  in.xi = xi;
  in.one_minus_eta = one_minus_eta;
  return in;
}

double theorem2_bound(std::uint64_t t, const BoundInputs& in) {
  if (t < 1) throw ConfigError("theorem2_bound: t must be >= 1");
  const double m = static_cast<double>(in.m);
  const double p = static_cast<double>(in.p);
  const double root = std::sqrt(static_cast<double>(t) + 1.0);
  const double mixing = in.xi * in.one_minus_eta;
  const double log_next = std::log(static_cast<double>(t) + 1.0);
  const double log_t = std::log(static_cast<double>(t));
  return m * in.mu0_l1_mean / (2.0 * in.c * root) + in.c * in.G * in.G * (1.0 + log_next) / (2.0 * m * root) +
         16.0 * in.G * in.mu0_l1_sum / (mixing * root) + 16.0 * in.c * p * in.G * in.G * (1.0 + log_t) / (mixing * root);
}

double theorem3_bound(std::uint64_t t, const BoundInputs& in) {
  if (t < 1) throw ConfigError("theorem3_bound: t must be >= 1");
  const double m = static_cast<double>(in.m);
  const double p = static_cast<double>(in.p);
  const double next = static_cast<double>(t) + 1.0;
  const double mixing = in.xi * in.one_minus_eta;
  return 4.0 * m * m * in.mu0_l1_mean / (in.c * in.c * next) + 2.0 * in.G * in.G * (1.0 + std::log(next)) / next +
         64.0 * in.G * m * in.mu0_l1_sum / (in.c * mixing * next) +
         64.0 * m * p * in.G * in.G * (1.0 + std::log(static_cast<double>(t))) / (mixing * next);
}

double gap_rate_statistic(const IterationRecord& r) {
  const double t = static_cast<double>(r.t);
  return r.objective_gap.value_or(std::numeric_limits<double>::quiet_NaN()) * std::sqrt(t) / (1.0 + std::log(t));
}

double violation_rate_statistic(const IterationRecord& r) {
  const double t = static_cast<double>(r.t);
  return r.violation_norm * r.violation_norm * t / (1.0 + std::log(t));
}

EnvelopeCheck rate_envelope(std::span<const IterationRecord> records,
                            const std::function<double(const IterationRecord&)>& statistic,
                            std::uint64_t burn_begin, std::uint64_t burn_end, std::uint64_t horizon_end) {
  EnvelopeCheck out;
  out.burn_in_max = -std::numeric_limits<double>::infinity();
  out.tail_max = -std::numeric_limits<double>::infinity();
  bool saw_burn = false, saw_tail = false;
  for (const auto& r : records) {
    if (r.t < burn_begin || r.t > horizon_end) continue;
    const double v = statistic(r);
    if (std::isnan(v)) return out;
    if (r.t <= burn_end) {
      out.burn_in_max = std::max(out.burn_in_max, v);
      saw_burn = true;
    }
    if (r.t >= burn_end) {
      if (v > out.tail_max) {
        out.tail_max = v;
        out.worst_t = r.t;
      }
      saw_tail = true;
    }
  }
  out.holds = saw_burn && saw_tail && out.tail_max <= out.burn_in_max;
  return out;
}

namespace {

template <typename Empirical, typename Bound>
BoundCheck check_bound(std::span<const IterationRecord> records, Empirical empirical, Bound bound) {
  BoundCheck out;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    if (r.t < 2) continue;
    const auto value = empirical(r);
    if (!value) continue;
    const double margin = bound(r.t - 1) - *value;
    ++out.checked;
    if (!(margin >= 0.0)) ++out.violations;
    out.min_margin = std::min(out.min_margin, margin);
  }
  return out;
}

}  // namespace

BoundCheck check_gap_bound(std::span<const IterationRecord> records, const BoundInputs& in) {
  return check_bound(
      records, [](const IterationRecord& r) { return r.objective_gap; },
      [&](std::uint64_t t) { return theorem2_bound(t, in); });
}

BoundCheck check_violation_bound(std::span<const IterationRecord> records, const BoundInputs& in) {
  return check_bound(
      records, [](const IterationRecord& r) { return std::optional<double>(r.violation_norm * r.violation_norm); },
      [&](std::uint64_t t) { return theorem3_bound(t, in); });
}

}  // namespace ddsgps
