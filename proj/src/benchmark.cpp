#include "ddsgps/benchmark.hpp"

#include "ddsgps/errors.hpp"

#include <array>
#include <string>

namespace ddsgps {

namespace {

struct Generator {
  double a;
  double b;
  double c;
  double p_max;
  double local_demand;
};

constexpr std::array<Generator, 7> kIeee57Generators{{
    {0.0775795, 20.0, 0.0, 575.88, 241.0712},
    {0.01, 40.0, 0.0, 100.0, 100.0},
    {0.25, 20.0, 0.0, 140.0, 74.8088},
    {0.01, 40.0, 0.0, 100.0, 100.0},
    {0.0222222, 20.0, 0.0, 550.0, 550.0},
    {0.01, 40.0, 0.0, 100.0, 100.0},
    {0.0322581, 20.0, 0.0, 410.0, 410.0},
}};

}  // namespace

ProblemInstance ieee57() {
  ProblemInstance inst;
  inst.coupling_dim = 1;
  for (const auto& g : kIeee57Generators) {
    AgentProblem agent;
    agent.objective.a = Vector::Constant(1, g.a);
    agent.objective.b = Vector::Constant(1, g.b);
    agent.objective.c = g.c;
    agent.box.lo = Vector::Zero(1);
    agent.box.hi = Vector::Constant(1, g.p_max);
    agent.coupling_matrix = Matrix::Ones(1, 1);
    agent.coupling_offset = Vector::Constant(1, g.local_demand);
    inst.agents.push_back(std::move(agent));
  }
  return inst;
}

ProblemInstance builtin_problem(std::string_view name) {
  if (name == "ieee57") return ieee57();
  throw ConfigError("problem: unknown builtin '" + std::string(name) + "'");
}

}  // namespace ddsgps
