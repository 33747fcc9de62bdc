#include "ddsgps/problem.hpp"

#include "ddsgps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ddsgps {

double DiagonalQuadratic::value(const Vector& x) const {
  double total = c;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    total += a[k] * x[k] * x[k] + b[k] * x[k];
  }
  return total;
}

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x[k] < lo[k] - tol || x[k] > hi[k] + tol) return false;
  }
  return true;
}

void AgentProblem::validate() const {
  const auto n = box.lo.size();
  if (box.hi.size() != n || objective.a.size() != n || objective.b.size() != n) {
    throw ConfigError("agent: objective and box sizes disagree");
  }
  if (n == 0) throw ConfigError("agent: empty decision vector");
  if (coupling_matrix.cols() != n) {
    throw ConfigError("agent: coupling_matrix has " + std::to_string(coupling_matrix.cols()) +
                      " columns, expected " + std::to_string(n));
  }
  if (coupling_matrix.rows() != coupling_offset.size()) {
    throw ConfigError("agent: coupling_matrix rows do not match coupling_offset length");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!std::isfinite(box.lo[k]) || !std::isfinite(box.hi[k])) {
      throw ConfigError("agent: box bounds must be finite");
    }
    if (box.hi[k] < box.lo[k]) throw ConfigError("agent: box has hi < lo");
    if (!(objective.a[k] >= 0.0) || !std::isfinite(objective.a[k])) {
      throw ConfigError("agent: quadratic coefficient a must be finite and >= 0");
    }
    if (!std::isfinite(objective.b[k])) throw ConfigError("agent: linear coefficient b must be finite");
  }
  if (!coupling_matrix.allFinite() || !coupling_offset.allFinite() || !std::isfinite(objective.c)) {
    throw ConfigError("agent: coupling data must be finite");
  }
}

double AgentProblem::lagrangian(const Vector& x, const Vector& lambda) const {
  return objective.value(x) + lambda.dot(subgradient(*this, x));
}

void ProblemInstance::validate() const {
  if (agents.empty()) throw ConfigError("problem: at least one agent is required");
  if (coupling_dim == 0) throw ConfigError("problem: coupling dimension must be positive");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    try {
      agents[i].validate();
    } catch (const ConfigError& e) {
      throw ConfigError("agent " + std::to_string(i + 1) + ": " + e.what());
    }
    if (agents[i].coupling_dim() != coupling_dim) {
      throw ConfigError("agent " + std::to_string(i + 1) + ": coupling dimension " +
                        std::to_string(agents[i].coupling_dim()) + " differs from " +
                        std::to_string(coupling_dim));
    }
  }
}

namespace {

void check_point(const ProblemInstance& inst, std::span<const Vector> x) {
  if (x.size() != inst.size()) {
    throw ConfigError("expected " + std::to_string(inst.size()) + " agent vectors, got " +
                      std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (static_cast<std::size_t>(x[i].size()) != inst.agents[i].dim()) {
      throw ConfigError("agent " + std::to_string(i + 1) + ": vector has dimension " +
                        std::to_string(x[i].size()) + ", expected " +
                        std::to_string(inst.agents[i].dim()));
    }
  }
}

void check_multiplier(const AgentProblem& agent, const Vector& lambda) {
  if (static_cast<std::size_t>(lambda.size()) != agent.coupling_dim()) {
    throw ConfigError("multiplier has length " + std::to_string(lambda.size()) + ", expected " +
                      std::to_string(agent.coupling_dim()));
  }
}

}  // namespace

double evaluate_objective(const ProblemInstance& inst, std::span<const Vector> x) {
  check_point(inst, x);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += inst.agents[i].objective.value(x[i]);
  return total;
}

double evaluate_lagrangian(const ProblemInstance& inst, std::span<const Vector> x, const Vector& lambda) {
  check_point(inst, x);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    check_multiplier(inst.agents[i], lambda);
    total += inst.agents[i].lagrangian(x[i], lambda);
  }
  return total;
}

Vector coupling_residual(const ProblemInstance& inst, std::span<const Vector> x) {
  check_point(inst, x);
  Vector total = Vector::Zero(static_cast<Eigen::Index>(inst.coupling_dim));
  for (std::size_t i = 0; i < x.size(); ++i) total += subgradient(inst.agents[i], x[i]);
  return total;
}

Vector local_argmin(const AgentProblem& agent, const Vector& lambda) {
  check_multiplier(agent, lambda);
  const Vector linear = agent.objective.b + agent.coupling_matrix.transpose() * lambda;
  Vector x(linear.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double a = agent.objective.a[k];
    const double lo = agent.box.lo[k];
    const double hi = agent.box.hi[k];
    if (a > 0.0) {
      x[k] = std::clamp(-linear[k] / (2.0 * a), lo, hi);
    } else {
      x[k] = linear[k] < 0.0 ? hi : lo;
    }
  }
  return x;
}

Vector subgradient(const AgentProblem& agent, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != agent.dim()) {
    throw ConfigError("subgradient: vector has dimension " + std::to_string(x.size()) +
                      ", expected " + std::to_string(agent.dim()));
  }
  return agent.coupling_matrix * x - agent.coupling_offset;
}

double subgradient_bound(const AgentProblem& agent) {
  const Vector mid = agent.box.midpoint();
  const Vector rad = agent.box.radius();
  const Vector center = agent.coupling_matrix * mid - agent.coupling_offset;
  const Vector spread = agent.coupling_matrix.cwiseAbs() * rad;
  return (center.cwiseAbs() + spread).norm();
}

double dual_value(const ProblemInstance& inst, const Vector& lambda) {
  double total = 0.0;
  for (const auto& agent : inst.agents) total += agent.lagrangian(local_argmin(agent, lambda), lambda);
  return total;
}

}  // namespace ddsgps
