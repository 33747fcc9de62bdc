#include "ddsgps/oracle.hpp"

#include "ddsgps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ddsgps {

bool is_scalar_coupling(const ProblemInstance& inst) {
  if (inst.coupling_dim != 1) return false;
  return std::all_of(inst.agents.begin(), inst.agents.end(), [](const AgentProblem& a) {
    return a.dim() == 1 && a.coupling_matrix.rows() == 1 && a.coupling_matrix(0, 0) > 0.0;
  });
}

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

PrimalPoint argmin_all(const ProblemInstance& inst, const Vector& lambda) {
  PrimalPoint x;
  x.reserve(inst.size());
  for (const auto& agent : inst.agents) x.push_back(local_argmin(agent, lambda));
  return x;
}

// sum_i A_i x_i(lambda) - sum_i b_i for the scalar case.
double aggregate_excess(const ProblemInstance& inst, double lambda) {
  return coupling_residual(inst, argmin_all(inst, scalar(lambda)))[0];
}

}  // namespace

OracleResult solve_scalar_coupling(const ProblemInstance& inst) {
  inst.validate();
  if (!is_scalar_coupling(inst)) {
    throw ConfigError("scalar-coupling oracle needs p = 1, scalar agents and positive coupling coefficients");
  }

  double low_supply = 0.0, high_supply = 0.0, demand = 0.0;
  for (const auto& agent : inst.agents) {
    const double coeff = agent.coupling_matrix(0, 0);
    low_supply += coeff * agent.box.lo[0];
    high_supply += coeff * agent.box.hi[0];
    demand += agent.coupling_offset[0];
  }
  if (demand < low_supply || demand > high_supply) {
    throw InfeasibleError("Slater violated: demand " + std::to_string(demand) + " outside achievable range [" +
                          std::to_string(low_supply) + ", " + std::to_string(high_supply) + "]");
  }

  double limit = 1e3;
  while (!(aggregate_excess(inst, -limit) >= 0.0 && aggregate_excess(inst, limit) <= 0.0)) {
    limit *= 2.0;
    if (limit > 1e12) throw InfeasibleError("Slater violated: multiplier bracket exceeded 1e12");
  }

  // Invariant: excess(lo) >= 0 >= excess(hi). Runs to machine resolution,
  // which is well below the 1e-12 width target for moderate multipliers.
  double lo = -limit, hi = limit;
  std::size_t iterations = 0;
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    ++iterations;
    if (aggregate_excess(inst, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  const double excess_lo = aggregate_excess(inst, lo);
  const double excess_hi = aggregate_excess(inst, hi);
  const double lambda = std::abs(excess_lo) < std::abs(excess_hi) ? lo : hi;

  OracleResult result;
  result.lambda_star = scalar(lambda);
  result.x_star = argmin_all(inst, result.lambda_star);
  result.iterations = iterations;

  // Linear agents switching inside the final bracket are indifferent at
  // lambda*; move them from the tie-break position to close the gap.
  const PrimalPoint x_lo = argmin_all(inst, scalar(lo));
  const PrimalPoint x_hi = argmin_all(inst, scalar(hi));
  double gap = coupling_residual(inst, result.x_star)[0];
  for (std::size_t i = 0; i < inst.size() && gap != 0.0; ++i) {
    const auto& agent = inst.agents[i];
    if (agent.objective.a[0] != 0.0 || x_lo[i][0] == x_hi[i][0]) continue;
    const double coeff = agent.coupling_matrix(0, 0);
    double& xi = result.x_star[i][0];
    const double target = std::clamp(xi - gap / coeff, agent.box.lo[0], agent.box.hi[0]);
    gap += coeff * (target - xi);
    xi = target;
  }

  result.f_star = evaluate_objective(inst, result.x_star);
  result.residual = coupling_residual(inst, result.x_star).norm();
  result.converged = true;
  return result;
}

OracleResult solve_general_small(const ProblemInstance& inst, const DualAscentOptions& options) {
  inst.validate();
  std::size_t total_dim = 0;
  for (const auto& agent : inst.agents) total_dim += agent.dim();
  if (total_dim > 100) throw ConfigError("dual-ascent oracle is limited to 100 decision variables in total");
  const auto p = static_cast<Eigen::Index>(inst.coupling_dim);

  double step0 = options.step0;
  if (step0 <= 0.0) {
    double curvature = 0.0, bound = 0.0;
    for (const auto& agent : inst.agents) {
      for (Eigen::Index k = 0; k < agent.coupling_matrix.cols(); ++k) {
        const double a = agent.objective.a[k];
        if (a > 0.0) curvature += agent.coupling_matrix.col(k).squaredNorm() / (2.0 * a);
      }
      bound += subgradient_bound(agent);
    }
    step0 = curvature > 0.0 ? 1.0 / curvature : 1.0 / std::max(1.0, bound);
  }

  Vector lambda = Vector::Zero(p);
  Vector best_lambda = lambda;
  double best_dual = -std::numeric_limits<double>::infinity();
  PrimalPoint averaged;
  double weight_sum = 0.0;

  for (std::size_t k = 1; k <= options.iterations; ++k) {
    const PrimalPoint x = argmin_all(inst, lambda);
    const Vector g = coupling_residual(inst, x);
    const double dual = evaluate_lagrangian(inst, x, lambda);
    if (dual > best_dual) {
      best_dual = dual;
      best_lambda = lambda;
    }
    const double alpha = step0 / std::sqrt(static_cast<double>(k));
    weight_sum += alpha;
    if (averaged.empty()) {
      averaged = x;
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) averaged[i] += (alpha / weight_sum) * (x[i] - averaged[i]);
    }
    lambda += alpha * g;
  }

  OracleResult result;
  result.lambda_star = best_lambda;
  result.iterations = options.iterations;
  result.f_star = best_dual;
  const PrimalPoint at_best = argmin_all(inst, best_lambda);
  const double residual_best = coupling_residual(inst, at_best).norm();
  const double residual_avg = averaged.empty() ? std::numeric_limits<double>::infinity()
                                               : coupling_residual(inst, averaged).norm();
  if (residual_best <= residual_avg) {
    result.x_star = at_best;
    result.residual = residual_best;
  } else {
    result.x_star = averaged;
    result.residual = residual_avg;
  }
  double scale = 1.0;
  for (const auto& agent : inst.agents) scale += agent.coupling_offset.norm();
  result.converged = result.residual <= options.residual_tolerance * scale;
  return result;
}

OracleResult solve(const ProblemInstance& inst) {
  if (is_scalar_coupling(inst)) return solve_scalar_coupling(inst);
  return solve_general_small(inst);
}

}  // namespace ddsgps
