#include "ddsgps/benchmark.hpp"
#include "ddsgps/config.hpp"
#include "ddsgps/csv.hpp"
#include "ddsgps/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ddsgps;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ddsgps_test_config_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kInline = R"(problem:
  agents:
    - objective: {a: [1.0, 0.5], b: [0.0, 1.0], c: 2.0}
      box: {lo: [-1, -2], hi: [1, 2]}
      coupling_matrix: [[1, 0], [0, 1]]
      coupling_offset: [0.25, -0.5]
    - objective: {a: 0.25, b: 1.5}
      box: {lo: 0, hi: 3}
      coupling_matrix: [[1], [2]]
      coupling_offset: [1, 1]
schedule:
  kind: static
  edges: [[1, 2], [2, 1]]
stepsize: {kind: constant, c: 0.125}
iterations: 40
mu0: [[1, 2], [3, 4]]
tolerances: {consensus: 1e-6}
threads: 2
)";

}  // namespace

TEST_CASE("builtin benchmark with defaults") {
  const auto cfg = parse_config("problem: {builtin: ieee57}\n");
  CHECK(cfg.iterations == 1500);
  CHECK(cfg.schedule.kind == ScheduleKind::Static);
  CHECK(cfg.schedule.m == 7);
  CHECK(cfg.schedule.B == 1);
  CHECK(cfg.stepsize.kind == StepsizeKind::InverseSqrt);
  CHECK(cfg.stepsize.c == 2.0);
  CHECK_FALSE(cfg.mu0.has_value());

  const auto inst = cfg.instance();
  REQUIRE(inst.size() == 7);
  CHECK(inst.coupling_dim == 1);
  const double a[] = {0.0775795, 0.01, 0.25, 0.01, 0.0222222, 0.01, 0.0322581};
  const double b[] = {20, 40, 20, 40, 20, 40, 20};
  const double hi[] = {575.88, 100, 140, 100, 550, 100, 410};
  const double demand[] = {241.0712, 100, 74.8088, 100, 550, 100, 410};
  double total = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    const auto& agent = inst.agents[i];
    CHECK(agent.objective.a[0] == a[i]);
    CHECK(agent.objective.b[0] == b[i]);
    CHECK(agent.objective.c == 0.0);
    CHECK(agent.box.lo[0] == 0.0);
    CHECK(agent.box.hi[0] == hi[i]);
    CHECK(agent.coupling_matrix(0, 0) == 1.0);
    CHECK(agent.coupling_offset[0] == demand[i]);
    total += agent.coupling_offset[0];
  }
  CHECK(total == doctest::Approx(1575.88).epsilon(1e-15));
  CHECK(parse_config("problem: ieee57\n").instance().size() == 7);
  CHECK(parse_config("problem: {builtin: ieee57}\nschedule: {kind: ring-rotation}\n").schedule.B == 7);
}

TEST_CASE("inline instance") {
  const auto cfg = parse_config(kInline);
  const auto inst = cfg.instance();
  REQUIRE(inst.size() == 2);
  CHECK(inst.coupling_dim == 2);
  CHECK(inst.agents[0].objective.c == 2.0);
  CHECK(inst.agents[1].box.hi[0] == 3.0);
  CHECK(inst.agents[1].coupling_matrix(1, 0) == 2.0);
  REQUIRE(cfg.schedule.edges.has_value());
  CHECK(*cfg.schedule.edges == std::vector<Edge>{{0, 1}, {1, 0}});
  CHECK(cfg.stepsize.kind == StepsizeKind::Constant);
  CHECK(cfg.initial_mu()[1][1] == 4.0);
  CHECK(cfg.tolerances.consensus == 1e-6);
  CHECK_FALSE(cfg.tolerances.violation.has_value());
  CHECK(cfg.threads == 2);
}

TEST_CASE("validation errors name the field") {
  auto rejects = [](const std::string& text, const std::string& fragment) {
    CAPTURE(text);
    CHECK_THROWS_WITH_AS(parse_config(text, "cfg.yaml"), doctest::Contains(fragment.c_str()), ConfigError);
  };
  rejects("problem: {builtin: ieee57}\nschedule: {m: 6}\n", "schedule.m");
  rejects("problem: {builtin: ieee57}\niterations: 0\n", "iterations");
  rejects("problem: {builtin: ieee14}\n", "problem.builtin");
  rejects("problem: {builtin: ieee57}\nschedule: {kind: mesh}\n", "schedule.kind");
  rejects("problem: {builtin: ieee57}\nschedule: {kind: static, B: 0}\n", "schedule.B");
  rejects("problem: {builtin: ieee57}\nschedule: {edges: [[1, 9]]}\n", "schedule.edges");
  rejects("problem: {builtin: ieee57}\nschedule: {kind: ring-rotation, edges: [[1, 2]]}\n", "schedule.edges");
  rejects("problem: {builtin: ieee57}\nstepsize: {c: -1}\n", "stepsize.c");
  rejects("problem: {builtin: ieee57}\nstepsize: {kind: table, table: [1, 2]}\niterations: 3\n", "stepsize.table");
  rejects("problem: {builtin: ieee57}\nmu0: [[0]]\n", "mu0");
  rejects("problem: {builtin: ieee57}\nmu0: maybe\n", "mu0");
  rejects("problem: {builtin: ieee57}\ncolour: red\n", "colour");
  rejects("problem: {builtin: ieee57}\niterations: lots\n", "iterations");
  rejects("problem: {builtin: ieee57}\nthreads: 0\n", "threads");
  rejects("schedule: {kind: static}\n", "problem");
  rejects("problem:\n  agents:\n    - objective: {a: -1, b: 0}\n      box: {lo: 0, hi: 1}\n      coupling_matrix: 1\n"
          "      coupling_offset: 0\n",
          "problem");
  rejects("problem: {builtin: ieee57}\nschedule: [\n", "cfg.yaml:");
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_config("problem: {builtin: ieee57}\nschedule:\n  kind: static\n  wobble: 3\n", "run.yaml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("run.yaml:4") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/ddsgps.yaml"), ConfigError);
}

TEST_CASE("canonical serialization round-trips") {
  for (const char* text : {"problem: {builtin: ieee57}\n", kInline,
                           "problem: ieee57\nschedule: {kind: random-window, B: 3, seed: 99}\n"
                           "stepsize: {kind: table, table: [0.5, 0.25, 0.125]}\niterations: 3\n"
                           "outputs: {csv: a.csv, summary: s.json, trace: t.csv}\n"
                           "tolerances: {consensus: 1e-3, violation: 0.1}\n"}) {
    const auto first = parse_config(text);
    const std::string canonical = serialize_config(first);
    const auto second = parse_config(canonical);
    CHECK(serialize_config(second) == canonical);
    CHECK(second.schedule.kind == first.schedule.kind);
    CHECK(second.schedule.seed == first.schedule.seed);
    CHECK(second.stepsize.table == first.stepsize.table);
    CHECK(second.tolerances.violation == first.tolerances.violation);
    CHECK(second.outputs.trace == first.outputs.trace);
  }
}

TEST_CASE("experiment artifacts") {
  const auto dir = scratch_dir("artifacts");
  auto cfg = parse_config("problem: {builtin: ieee57}\nschedule: {kind: ring-rotation}\niterations: 1500\n");
  cfg.outputs.csv = (dir / "run.csv").string();
  cfg.outputs.summary = (dir / "summary.json").string();
  cfg.outputs.trace = (dir / "trace.csv").string();
  const auto summary = run_experiment(cfg);

  CHECK(summary.exit_status() == 0);
  CHECK(summary.invariant_failures.empty());
  CHECK(summary.warnings.empty());
  CHECK(summary.iterations_used == 1500);
  REQUIRE(summary.oracle.has_value());
  const double lambda_star = summary.oracle->lambda_star[0];
  CHECK(summary.final_spread <= 1e-3 * std::max(1.0, std::abs(lambda_star)));
  CHECK(summary.final_violation <= 0.01 * kIeee57Demand);
  CHECK(*summary.final_gap <= 0.005 * summary.oracle->f_star);

  std::ifstream csv(cfg.outputs.csv);
  const auto file = read_csv(csv);
  CHECK(file.rows.size() == 1500);
  CHECK(verify_csv(file).ok());

  const auto json = nlohmann::json::parse(slurp(cfg.outputs.summary));
  CHECK(json["iterations_used"] == 1500);
  CHECK(json["f_star"].get<double>() == summary.oracle->f_star);

  std::istringstream trace(slurp(cfg.outputs.trace));
  std::string header;
  std::getline(trace, header);
  CHECK(header == "t,from,to,nu_share,mu_share");

  SUBCASE("identical config gives byte-identical CSV, also with threads") {
    auto again = cfg;
    again.outputs = {(dir / "again.csv").string(), "", ""};
    again.threads = 7;
    run_experiment(again);
    CHECK(slurp(cfg.outputs.csv) == slurp(again.outputs.csv));
  }
  SUBCASE("constant stepsize draws a warning") {
    auto flat = cfg;
    flat.outputs = {};
    flat.stepsize.kind = StepsizeKind::Constant;
    flat.stepsize.c = 0.1;
    flat.iterations = 10;
    const auto s = run_experiment(flat);
    CHECK(s.warnings.size() == 1);
  }
  fs::remove_all(dir);
}
