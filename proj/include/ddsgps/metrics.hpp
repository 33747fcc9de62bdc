#pragma once

// Per-round diagnostics of a push-sum dual subgradient run and the
// closed-form rate bounds they are compared against.

#include "ddsgps/oracle.hpp"
#include "ddsgps/pushsum.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ddsgps {

struct IterationRecord {
  std::uint64_t t = 0;
  double beta = 0.0;
  double objective_hat = 0.0;                 // F(x_hat[t])
  std::optional<double> objective_gap;        // F(x_hat[t]) - F*
  double violation_norm = 0.0;                // ||sum_i (A_i x_hat_i - b_i)||
  double consensus_spread = 0.0;              // max_{i,j} ||lambda_i - lambda_j||
  std::optional<double> dual_distance;        // max_i ||lambda_i - lambda*||
  double identity_residual = 0.0;             // violation vs m(mu_bar[t] - mu_bar[0]) / sum beta
  Vector mean_dual;                           // mu_bar[t]

  double mean_dual_residual = 0.0;            // mu_bar[t] vs mu_bar[t-1] + beta/m sum_j g_j
  double nu_sum = 0.0;                        // sum_i nu_i
  double push_deviation = 0.0;                // max_i ||lambda_i[t] - mu_bar[t-1]||
  std::optional<double> descent_margin;        // (rhs - lhs) / scale; >= 0 when the inequality holds
};

/// Everything record() reads from a finished round.
struct RoundView {
  std::uint64_t t = 0;
  double beta = 0.0;
  double cumulative_beta = 0.0;
  std::span<const AgentState> states;
  std::span<const AgentState> previous_states;
  Vector mean_dual;
  Vector previous_mean_dual;
  Vector initial_mean_dual;
};

RoundView view_of(const Simulation& sim);

class Recorder {
 public:
  Recorder(const ProblemInstance& inst, std::optional<OracleResult> oracle);

  const std::vector<double>& subgradient_bounds() const { return bounds_; }
  double total_bound() const { return total_bound_; }
  const std::optional<OracleResult>& oracle() const { return oracle_; }

  IterationRecord record(const RoundView& round) const;

 private:
  const ProblemInstance* inst_;
  std::optional<OracleResult> oracle_;
  std::vector<double> bounds_;
  double total_bound_ = 0.0;
};

/// Constants entering the closed-form rate bounds for beta[t] = c / sqrt(t).
struct BoundInputs {
  double c = 1.0;
  double G = 0.0;             // sum_i G_i
  std::size_t m = 1;
  std::size_t p = 1;
  double mu0_l1_mean = 0.0;   // ||mu_bar[0]||_1
  double mu0_l1_sum = 0.0;    // sum_j ||mu_j[0]||_1
  double xi = 1.0;
  double one_minus_eta = 1.0; // 1 - eta, kept separately to avoid cancellation
};

BoundInputs make_bound_inputs(const ProblemInstance& inst, std::span<const Vector> mu0, double c, double xi,
                              double one_minus_eta);

/// Upper bound on F(x_hat[t+1]) - F* for t >= 1.
double theorem2_bound(std::uint64_t t, const BoundInputs& in);
/// Upper bound on ||sum_i (A_i x_hat_i[t+1] - b_i)||^2 for t >= 1.
double theorem3_bound(std::uint64_t t, const BoundInputs& in);

/// gap * sqrt(t) / (1 + ln t)
double gap_rate_statistic(const IterationRecord& r);
/// violation^2 * t / (1 + ln t)
double violation_rate_statistic(const IterationRecord& r);

struct EnvelopeCheck {
  double burn_in_max = 0.0;
  double tail_max = 0.0;
  std::uint64_t worst_t = 0;
  bool holds = false;
};

/// Compares the max of `statistic` over t in [burn_begin, burn_end] with its
/// max over [burn_end, horizon_end].
EnvelopeCheck rate_envelope(std::span<const IterationRecord> records,
                            const std::function<double(const IterationRecord&)>& statistic,
                            std::uint64_t burn_begin, std::uint64_t burn_end, std::uint64_t horizon_end);

struct BoundCheck {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double min_margin = 0.0;  // smallest bound - empirical
};

/// Every record with t >= 2 against theorem2_bound(t-1) (gap) and
/// theorem3_bound(t-1) (violation^2).
BoundCheck check_gap_bound(std::span<const IterationRecord> records, const BoundInputs& in);
BoundCheck check_violation_bound(std::span<const IterationRecord> records, const BoundInputs& in);

}  // namespace ddsgps
