#include "ddsgps/benchmark.hpp"
#include "ddsgps/errors.hpp"
#include "ddsgps/oracle.hpp"
#include "ddsgps/pushsum.hpp"
#include "ddsgps/runner.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

using namespace ddsgps;
using ddsgps::testing::scalar_agent;

namespace {

ProblemInstance two_agents() {
  ProblemInstance inst;
  inst.coupling_dim = 1;
  inst.agents.push_back(scalar_agent(1.0, 0.0, -10.0, 10.0, 1.0, 1.0));
  inst.agents.push_back(scalar_agent(1.0, 0.0, -10.0, 10.0, 1.0, 1.0));
  return inst;
}

std::vector<AgentState> states_with_mu(const ProblemInstance& inst, std::vector<double> mu) {
  std::vector<Vector> mu0;
  for (double v : mu) mu0.push_back(Vector::Constant(1, v));
  return initialize(inst, mu0);
}

bool bitwise_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_CASE("stepsize schedules") {
  const auto inv = StepsizeSchedule::inverse_sqrt(2.0);
  CHECK(inv.at(1) == 2.0);
  CHECK(inv.at(4) == 1.0);
  CHECK(inv.satisfies_decay_conditions());
  CHECK_THROWS_AS(inv.at(0), ConfigError);

  const auto flat = StepsizeSchedule::constant(0.5);
  CHECK(flat.at(1000) == 0.5);
  CHECK_FALSE(flat.satisfies_decay_conditions());

  const auto tab = StepsizeSchedule::table({3.0, 2.0});
  CHECK(tab.at(2) == 2.0);
  CHECK_THROWS_AS(tab.at(3), ConfigError);
  CHECK_FALSE(tab.satisfies_decay_conditions());

  CHECK_THROWS_AS(StepsizeSchedule::inverse_sqrt(0.0), ConfigError);
  CHECK_THROWS_AS(StepsizeSchedule::table({}), ConfigError);
  CHECK_THROWS_AS(StepsizeSchedule::table({1.0, -1.0}), ConfigError);
  for (auto kind : {StepsizeKind::InverseSqrt, StepsizeKind::Constant, StepsizeKind::Table})
    CHECK(parse_stepsize_kind(to_string(kind)) == kind);
}

TEST_CASE("initialize") {
  SUBCASE("zero mu0") {
    const auto inst = ieee57();
    const auto states = initialize(inst, zero_mu0(inst));
    REQUIRE(states.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(states[i].nu == 1.0);
      CHECK(states[i].lambda[0] == 0.0);
      CHECK(states[i].u[0] == 0.0);
      // b_i > 0 and a_i > 0 put the stationary point -b/(2a) below the lower bound 0.
      CHECK(-inst.agents[i].objective.b[0] / (2.0 * inst.agents[i].objective.a[0]) < 0.0);
      CHECK(states[i].x[0] == 0.0);
      CHECK(states[i].x_hat[0] == 0.0);
    }
  }
  SUBCASE("single agent ratio") {
    const auto inst = testing::single(scalar_agent(1.0, 0.0, -10.0, 10.0, 1.0, 4.0));
    const auto states = states_with_mu(inst, {5.0});
    CHECK(states[0].lambda[0] == 5.0);
    CHECK(states[0].lambda_hat[0] == 5.0);
  }
  SUBCASE("dimension mismatch") {
    const auto inst = ieee57();
    CHECK_THROWS_AS(initialize(inst, std::vector<Vector>(6, Vector::Zero(1))), ConfigError);
    CHECK_THROWS_AS(initialize(inst, std::vector<Vector>(7, Vector::Zero(2))), ConfigError);
  }
}

TEST_CASE("one round") {
  SUBCASE("complete graph on two agents") {
    const auto inst = two_agents();
    const auto states = states_with_mu(inst, {0.0, 4.0});
    const auto res = round(states, DigraphSnapshot(2, {{0, 1}, {1, 0}}), 0.5, inst);
    for (const auto& s : res.states) {
      CHECK(s.u[0] == 2.0);
      CHECK(s.nu == 1.0);
      CHECK(s.lambda[0] == 2.0);
      // argmin of x^2 + 2x on [-10, 10]
      CHECK(s.x[0] == -1.0);
      CHECK(s.mu[0] == 2.0 + 0.5 * (-1.0 - 1.0));
    }
    CHECK(res.beta == 0.5);
  }
  SUBCASE("single agent reduces to the centralized step") {
    const auto inst = testing::single(scalar_agent(0.5, 1.0, -4.0, 4.0, 2.0, 3.0));
    const auto states = states_with_mu(inst, {1.5});
    const auto res = round(states, DigraphSnapshot(1), 0.25, inst);
    const double x = std::clamp(-(1.0 + 2.0 * 1.5) / (2.0 * 0.5), -4.0, 4.0);
    CHECK(res.states[0].u[0] == 1.5);
    CHECK(res.states[0].nu == 1.0);
    CHECK(res.states[0].x[0] == x);
    CHECK(res.states[0].mu[0] == 1.5 + 0.25 * (2.0 * x - 3.0));
  }
  SUBCASE("three-cycle conserves nu") {
    ProblemInstance inst;
    inst.coupling_dim = 1;
    for (int i = 0; i < 3; ++i) inst.agents.push_back(scalar_agent(1.0, 0.0, -1.0, 1.0, 1.0, 0.0));
    auto states = initialize(inst, zero_mu0(inst));
    const DigraphSnapshot ring(3, {{0, 1}, {1, 2}, {2, 0}});
    const auto res = round(states, ring, 1.0, inst);
    CHECK(res.states[0].nu + res.states[1].nu + res.states[2].nu == 3.0);
  }
  SUBCASE("preconditions") {
    const auto inst = two_agents();
    const auto states = states_with_mu(inst, {0.0, 0.0});
    CHECK_THROWS_AS(round(states, DigraphSnapshot(3), 1.0, inst), ConfigError);
    CHECK_THROWS_AS(round(states, DigraphSnapshot(2), 0.0, inst), ConfigError);
  }
}

TEST_CASE("running averages") {
  AgentState s;
  s.x = Vector::Constant(1, 7.0);
  s.x_hat = Vector::Constant(1, -3.0);
  s.lambda = Vector::Constant(1, 2.0);
  s.lambda_hat = Vector::Constant(1, 0.0);
  SUBCASE("first update copies the iterate") {
    const auto r = update_running_averages(s, 0.8, 0.8);
    CHECK(r.x_hat[0] == 7.0);
    CHECK(r.lambda_hat[0] == 2.0);
  }
  SUBCASE("two unit steps") {
    s.x = Vector::Constant(1, 0.0);
    auto r = update_running_averages(s, 1.0, 1.0);
    r.x = Vector::Constant(1, 4.0);
    r = update_running_averages(r, 1.0, 2.0);
    CHECK(r.x_hat[0] == 2.0);
  }
  SUBCASE("constant iterate is a fixed point") {
    s.x_hat = s.x;
    double cum = 0.0;
    for (int t = 1; t <= 50; ++t) {
      const double beta = 1.0 / std::sqrt(t);
      cum += beta;
      s = update_running_averages(s, beta, cum);
      CHECK(s.x_hat[0] == 7.0);
    }
  }
  SUBCASE("nonpositive cumulative weight") {
    CHECK_THROWS_AS(update_running_averages(s, 1.0, 0.0), ConfigError);
  }
}

TEST_CASE("single agent matches a centralized dual subgradient reference") {
  const double a = 0.05, b = 20.0, lo = 0.0, hi = 200.0, demand = 120.0, c = 2.0;
  const auto inst = testing::single(scalar_agent(a, b, lo, hi, 1.0, demand));
  Simulation sim(inst, GraphSchedule::static_ring(1), StepsizeSchedule::inverse_sqrt(c),
                 std::vector<Vector>{Vector::Zero(1)});

  double mu = 0.0, x_avg = 0.0, weight = 0.0;
  for (int t = 1; t <= 500; ++t) {
    const double lambda = mu;
    const double x = std::clamp(-(b + lambda) / (2.0 * a), lo, hi);
    const double beta = c / std::sqrt(static_cast<double>(t));
    mu = lambda + beta * (x - demand);
    weight += beta;
    x_avg += (beta / weight) * (x - x_avg);

    sim.step();
    const auto& s = sim.states()[0];
    REQUIRE(std::abs(s.lambda[0] - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda)));
    REQUIRE(std::abs(s.x[0] - x) <= 1e-12 * std::max(1.0, std::abs(x)));
    REQUIRE(std::abs(s.mu[0] - mu) <= 1e-12 * std::max(1.0, std::abs(mu)));
    REQUIRE(std::abs(s.x_hat[0] - x_avg) <= 1e-12 * std::max(1.0, std::abs(x_avg)));
  }
  // The reference converges to lambda* = -(b + 2a demand) = -32.
  CHECK(std::abs(mu + 32.0) < 1.0);
}

TEST_CASE("push-sum invariants over long runs") {
  const auto inst = ieee57();
  const std::vector<GraphSchedule> schedules{GraphSchedule::static_ring(7), GraphSchedule::ring_rotation(7),
                                             GraphSchedule::random_window(7, 3, 11)};
  for (const auto& sched : schedules) {
    CAPTURE(to_string(sched.kind()));
    Simulation sim(inst, sched, StepsizeSchedule::inverse_sqrt(2.0), zero_mu0(inst));
    std::vector<double> weighted_sum(7, 0.0);
    double cum = 0.0;
    double worst_nu = 0.0, worst_recursion = 0.0, worst_identity = 0.0, worst_batch = 0.0;
    for (int t = 1; t <= 10000; ++t) {
      const Vector prev_mean = mean_dual(sim.states());
      sim.step();
      const auto states = sim.states();

      double nu = 0.0;
      for (const auto& s : states) nu += s.nu;
      worst_nu = std::max(worst_nu, std::abs(nu - 7.0));

      double g = 0.0, g_hat = 0.0;
      for (std::size_t i = 0; i < 7; ++i) {
        g += states[i].x[0] - inst.agents[i].coupling_offset[0];
        g_hat += states[i].x_hat[0] - inst.agents[i].coupling_offset[0];
      }
      const double beta = sim.beta();
      cum += beta;
      const double mean = mean_dual(states)[0];
      const double predicted = prev_mean[0] + beta / 7.0 * g;
      worst_recursion = std::max(worst_recursion,
                                 std::abs(mean - predicted) / std::max({1.0, std::abs(mean), std::abs(beta * g)}));
      const double identity = 7.0 * mean / cum;
      worst_identity = std::max(worst_identity, std::abs(g_hat - identity) / std::max(1.0, std::abs(identity)));

      for (std::size_t i = 0; i < 7; ++i) {
        weighted_sum[i] += beta * states[i].x[0];
        const double batch = weighted_sum[i] / cum;
        worst_batch = std::max(worst_batch, std::abs(states[i].x_hat[0] - batch) / std::max(1.0, std::abs(batch)));
      }
    }
    CHECK(worst_nu <= 1e-12);
    CHECK(worst_recursion <= 1e-12);
    CHECK(worst_identity <= 1e-9);
    CHECK(worst_batch <= 1e-10);
  }
}

TEST_CASE("consensus deviation shrinks over trailing windows") {
  const auto inst = ieee57();
  for (const auto& sched : {GraphSchedule::static_ring(7), GraphSchedule::ring_rotation(7)}) {
    Simulation sim(inst, sched, StepsizeSchedule::inverse_sqrt(2.0), zero_mu0(inst));
    std::vector<double> window_max;
    double current = 0.0;
    for (int t = 1; t <= 4000; ++t) {
      const Vector prev_mean = sim.mean_dual();
      sim.step();
      for (const auto& s : sim.states()) current = std::max(current, (s.lambda - prev_mean).norm());
      if (t % 500 == 0) {
        window_max.push_back(current);
        current = 0.0;
      }
    }
    for (std::size_t k = 1; k < window_max.size(); ++k) CHECK(window_max[k] <= window_max[k - 1]);
    CHECK(window_max.back() < 1e-2 * window_max.front());
  }
}

TEST_CASE("IEEE57 total generation meets demand") {
  const auto inst = ieee57();
  Simulation sim(inst, GraphSchedule::static_ring(7), StepsizeSchedule::inverse_sqrt(2.0), zero_mu0(inst));
  for (int t = 0; t < 1500; ++t) sim.step();
  double total = 0.0;
  for (const auto& s : sim.states()) total += s.x_hat[0];
  CHECK(std::abs(total - kIeee57Demand) <= 0.01 * kIeee57Demand);
}

TEST_CASE("push-sum weight underflow is fatal") {
  const auto inst = two_agents();
  Simulation sim(inst, GraphSchedule::static_edges(2, {{0, 1}}), StepsizeSchedule::constant(0.1), zero_mu0(inst));
  // Agent 1 halves its weight every round and 2^-997 is below 1e-300.
  int rounds = 0;
  CHECK_THROWS_AS(
      [&] {
        for (; rounds < 2000; ++rounds) sim.step();
      }(),
      NumericalError);
  CHECK(rounds >= 990);
  CHECK(rounds <= 1000);
}

TEST_CASE("message trace reproduces the mixing sums") {
  const auto inst = ieee57();
  SimulationOptions options;
  options.trace_messages = true;
  Simulation sim(inst, GraphSchedule::random_window(7, 2, 3), StepsizeSchedule::inverse_sqrt(2.0), zero_mu0(inst),
                 options);
  for (int t = 0; t < 50; ++t) {
    const std::vector<AgentState> before(sim.states().begin(), sim.states().end());
    sim.step();
    std::vector<double> mu(7, 0.0), nu(7, 0.0);
    for (const auto& msg : sim.last_messages()) {
      mu[msg.to] += msg.mu_share[0];
      nu[msg.to] += msg.nu_share;
      CHECK(msg.nu_share > 0.0);
    }
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(mu[i] == sim.states()[i].u[0]);
      CHECK(nu[i] == sim.states()[i].nu);
    }
  }
}

TEST_CASE("parallel rounds are bitwise identical to serial rounds") {
  std::mt19937_64 rng(17);
  ProblemInstance inst;
  inst.coupling_dim = 2;
  for (int i = 0; i < 20; ++i) inst.agents.push_back(testing::random_agent(rng, 3, 2));
  std::vector<Vector> mu0;
  for (int i = 0; i < 20; ++i) mu0.push_back(Vector::NullaryExpr(2, [&] { return testing::uniform(rng, -1.0, 1.0); }));
  const auto sched = GraphSchedule::random_window(20, 4, 8);

  SimulationOptions serial, parallel;
  parallel.threads = 8;
  Simulation a(inst, sched, StepsizeSchedule::inverse_sqrt(1.0), mu0, serial);
  Simulation b(inst, sched, StepsizeSchedule::inverse_sqrt(1.0), mu0, parallel);
  for (int t = 0; t < 300; ++t) {
    a.step();
    b.step();
    for (std::size_t i = 0; i < 20; ++i) {
      const auto& sa = a.states()[i];
      const auto& sb = b.states()[i];
      REQUIRE(bitwise_equal(sa.mu, sb.mu));
      REQUIRE(std::memcmp(&sa.nu, &sb.nu, sizeof(double)) == 0);
      REQUIRE(bitwise_equal(sa.x, sb.x));
      REQUIRE(bitwise_equal(sa.x_hat, sb.x_hat));
      REQUIRE(bitwise_equal(sa.lambda_hat, sb.lambda_hat));
    }
  }
}

TEST_CASE("run driver") {
  const auto inst = ieee57();
  RunOptions options;
  CHECK_THROWS_AS(run(inst, GraphSchedule::static_ring(7), StepsizeSchedule::inverse_sqrt(2.0), zero_mu0(inst), options,
                      std::nullopt),
                  ConfigError);
  options.iterations = 3;
  const auto out =
      run(inst, GraphSchedule::static_ring(7), StepsizeSchedule::inverse_sqrt(2.0), zero_mu0(inst), options, std::nullopt);
  CHECK(out.rounds == 3);
  REQUIRE(out.records.size() == 3);
  CHECK(out.records[2].t == 3);
  CHECK_FALSE(out.records[0].objective_gap.has_value());

  options.iterations = 5000;
  options.consensus_tolerance = 1e-2;
  options.violation_tolerance = 20.0;
  const auto early =
      run(inst, GraphSchedule::static_ring(7), StepsizeSchedule::inverse_sqrt(2.0), zero_mu0(inst), options, std::nullopt);
  CHECK(early.early_exit);
  CHECK(early.rounds < 5000);
  CHECK(early.last.consensus_spread < 1e-2);
  CHECK(early.last.violation_norm < 20.0);

  CHECK_THROWS_AS(Simulation(inst, GraphSchedule::static_ring(6), StepsizeSchedule::constant(1.0), zero_mu0(inst)),
                  ConfigError);
}
