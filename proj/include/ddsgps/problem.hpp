#pragma once

// Problem instances for dual decomposition with a coupling equality constraint
//
//   minimize   sum_i f_i(x_i)
//   subject to sum_i (A_i x_i - b_i) = 0,   x_i in X_i
//
// Each f_i is a separable (diagonal) quadratic and X_i is a finite box, so the
// per-agent Lagrangian minimizer has a closed form.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace ddsgps {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// f(x) = sum_k a_k x_k^2 + b_k x_k + c with every a_k >= 0.
struct DiagonalQuadratic {
  Vector a;
  Vector b;
  double c = 0.0;

  double value(const Vector& x) const;
};

/// Closed box prod_k [lo_k, hi_k]; lo_k == hi_k is allowed.
struct Box {
  Vector lo;
  Vector hi;

  bool contains(const Vector& x, double tol = 0.0) const;
  Vector midpoint() const { return 0.5 * (lo + hi); }
  Vector radius() const { return 0.5 * (hi - lo); }
};

struct AgentProblem {
  DiagonalQuadratic objective;
  Box box;
  Matrix coupling_matrix;  // A_i, p x n_i
  Vector coupling_offset;  // b_i, length p

  std::size_t dim() const { return static_cast<std::size_t>(box.lo.size()); }
  std::size_t coupling_dim() const { return static_cast<std::size_t>(coupling_offset.size()); }

  /// Throws ConfigError when sizes disagree, a coefficient is negative or a
  /// bound is non-finite or inverted.
  void validate() const;

  /// L_i(x, lambda) = f_i(x) + lambda^T (A_i x - b_i)
  double lagrangian(const Vector& x, const Vector& lambda) const;
};

struct ProblemInstance {
  std::vector<AgentProblem> agents;
  std::size_t coupling_dim = 0;

  std::size_t size() const { return agents.size(); }
  void validate() const;
};

/// Per-agent decision vectors, indexed like ProblemInstance::agents.
using PrimalPoint = std::vector<Vector>;

/// F(x) = sum_i f_i(x_i), summed in agent order.
double evaluate_objective(const ProblemInstance& inst, std::span<const Vector> x);

/// L(x, lambda) = sum_i L_i(x_i, lambda), summed in agent order.
double evaluate_lagrangian(const ProblemInstance& inst, std::span<const Vector> x, const Vector& lambda);

/// Sum_i (A_i x_i - b_i).
Vector coupling_residual(const ProblemInstance& inst, std::span<const Vector> x);

/// argmin over the box of f_i(x) + lambda^T (A_i x - b_i).
///
/// Coordinates decouple because the objective is diagonal and the multiplier
/// only adds the linear term (A_i^T lambda)_k. With g_k = b_k + (A_i^T lambda)_k:
///   a_k > 0  -> clamp(-g_k / (2 a_k), lo_k, hi_k)
///   a_k == 0 -> lo_k if g_k >= 0, hi_k if g_k < 0 (ties go to lo_k)
Vector local_argmin(const AgentProblem& agent, const Vector& lambda);

/// A_i x - b_i, the subgradient of the agent's dual function at the
/// multiplier that produced x.
Vector subgradient(const AgentProblem& agent, const Vector& x);

/// Upper bound G_i on ||A_i x - b_i|| over the box, from interval arithmetic:
/// per row |A_r mid - b_r| + |A_r| rad, then the Euclidean norm of the rows.
double subgradient_bound(const AgentProblem& agent);

/// phi(lambda) = sum_i min_{x_i in X_i} L_i(x_i, lambda).
double dual_value(const ProblemInstance& inst, const Vector& lambda);

}  // namespace ddsgps
