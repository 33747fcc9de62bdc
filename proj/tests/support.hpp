#pragma once

// Instance builders and random generators shared by the unit tests.

#include "ddsgps/problem.hpp"

#include <random>

namespace ddsgps::testing {

inline AgentProblem scalar_agent(double a, double b, double lo, double hi, double coupling, double offset,
                                 double c = 0.0) {
  AgentProblem agent;
  agent.objective.a = Vector::Constant(1, a);
  agent.objective.b = Vector::Constant(1, b);
  agent.objective.c = c;
  agent.box.lo = Vector::Constant(1, lo);
  agent.box.hi = Vector::Constant(1, hi);
  agent.coupling_matrix = Matrix::Constant(1, 1, coupling);
  agent.coupling_offset = Vector::Constant(1, offset);
  return agent;
}

inline ProblemInstance single(AgentProblem agent) {
  ProblemInstance inst;
  inst.coupling_dim = static_cast<std::size_t>(agent.coupling_offset.size());
  inst.agents.push_back(std::move(agent));
  return inst;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector random_point(std::mt19937_64& rng, const Box& box) {
  Vector x(box.lo.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = uniform(rng, box.lo[k], box.hi[k]);
  return x;
}

/// Agent with n coordinates and p coupling rows; some coordinates linear.
inline AgentProblem random_agent(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p) {
  AgentProblem agent;
  agent.objective.a.resize(n);
  agent.objective.b.resize(n);
  agent.box.lo.resize(n);
  agent.box.hi.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    agent.objective.a[k] = uniform(rng, 0.0, 1.0) < 0.2 ? 0.0 : uniform(rng, 0.01, 2.0);
    agent.objective.b[k] = uniform(rng, -5.0, 5.0);
    const double lo = uniform(rng, -10.0, 5.0);
    agent.box.lo[k] = lo;
    agent.box.hi[k] = lo + (uniform(rng, 0.0, 1.0) < 0.1 ? 0.0 : uniform(rng, 0.1, 10.0));
  }
  agent.objective.c = uniform(rng, -1.0, 1.0);
  agent.coupling_matrix = Matrix::NullaryExpr(p, n, [&] { return uniform(rng, -2.0, 2.0); });
  agent.coupling_offset = Vector::NullaryExpr(p, [&] { return uniform(rng, -3.0, 3.0); });
  return agent;
}

/// Scalar economic-dispatch style instance with a strictly interior feasible
/// point; roughly one agent in five is linear.
inline ProblemInstance random_dispatch(std::mt19937_64& rng, std::size_t m) {
  ProblemInstance inst;
  inst.coupling_dim = 1;
  double demand = 0.0;
  std::vector<double> shares;
  for (std::size_t i = 0; i < m; ++i) {
    const double lo = uniform(rng, 0.0, 50.0);
    const double hi = lo + uniform(rng, 10.0, 200.0);
    const double a = uniform(rng, 0.0, 1.0) < 0.2 ? 0.0 : uniform(rng, 0.005, 0.3);
    const double coupling = uniform(rng, 0.5, 2.0);
    demand += coupling * uniform(rng, lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo));
    inst.agents.push_back(scalar_agent(a, uniform(rng, 5.0, 50.0), lo, hi, coupling, 0.0));
    shares.push_back(uniform(rng, 0.1, 1.0));
  }
  double total_share = 0.0;
  for (double s : shares) total_share += s;
  for (std::size_t i = 0; i < m; ++i) inst.agents[i].coupling_offset[0] = demand * shares[i] / total_share;
  return inst;
}

}  // namespace ddsgps::testing
