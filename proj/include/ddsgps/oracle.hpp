#pragma once

// Centralized ground truth for the coupled problem: optimal primal point,
// multiplier and value.

#include "ddsgps/problem.hpp"

#include <cstddef>

namespace ddsgps {

struct OracleResult {
  PrimalPoint x_star;
  Vector lambda_star;
  double f_star = 0.0;
  double residual = 0.0;  // ||sum_i (A_i x_i* - b_i)||
  bool converged = true;
  std::size_t iterations = 0;
};

/// Whether solve_scalar_coupling applies: p = 1, scalar agents, A_i > 0.
bool is_scalar_coupling(const ProblemInstance& inst);

/// Bisection on the multiplier for p = 1 problems with scalar agents and
/// positive coupling coefficients (economic dispatch form).
///
/// The aggregate sum_i A_i x_i(lambda) - sum_i b_i is nonincreasing in lambda.
/// The bracket [-L, L] starts at L = 1e3 and doubles until it brackets zero;
/// past L = 1e12 the instance is reported infeasible. Linear agents that are
/// indifferent at lambda* start at their lower bound and are raised in agent
/// order to absorb what is left of the demand.
///
/// Throws InfeasibleError when the boxes cannot meet the coupling constraint,
/// ConfigError when the instance is not of scalar-coupling form.
OracleResult solve_scalar_coupling(const ProblemInstance& inst);

struct DualAscentOptions {
  std::size_t iterations = 20000;
  double step0 = 0.0;                // <= 0 picks 1 / (sum_i ||A_i||^2 / (2 min a)) style default
  double residual_tolerance = 1e-6;  // converged flag threshold, relative to sum_i ||b_i||
};

/// Centralized dual subgradient ascent lambda <- lambda + step0/sqrt(k) g(lambda)
/// with beta-weighted primal averaging. Reports the averaged primal or the
/// argmin at the best multiplier, whichever is closer to feasible, and the
/// best dual value as f_star. Never throws on non-convergence; check
/// `converged` and `residual`.
OracleResult solve_general_small(const ProblemInstance& inst, const DualAscentOptions& options = {});

/// Scalar-coupling bisection when it applies, dual ascent otherwise.
OracleResult solve(const ProblemInstance& inst);

}  // namespace ddsgps
