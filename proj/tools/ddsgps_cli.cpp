// ddsgps: run, verify and inspect push-sum dual subgradient experiments.
//
//   ddsgps run <config> [--iterations N] [--seed S] [--c C] [--out run.csv]
//   ddsgps verify <csv>
//   ddsgps oracle <config>

#include "ddsgps/config.hpp"
#include "ddsgps/csv.hpp"
#include "ddsgps/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int cmd_run(const std::string& path, const std::optional<std::uint64_t>& iterations,
            const std::optional<std::uint64_t>& seed, const std::optional<double>& c, const std::optional<std::string>& out,
            const std::optional<std::string>& summary, const std::optional<unsigned>& threads) {
  ddsgps::RunConfig cfg = ddsgps::load_config(path);
  if (iterations) cfg.iterations = *iterations;
  if (seed) cfg.schedule.seed = *seed;
  if (c) cfg.stepsize.c = *c;
  if (out) cfg.outputs.csv = *out;
  if (summary) cfg.outputs.summary = *summary;
  if (threads) cfg.threads = *threads;

  const auto result = ddsgps::run_experiment(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : result.invariant_failures) std::cerr << "invariant failure: " << f << '\n';
  std::cout << result.to_json().dump(2) << '\n';
  return result.exit_status();
}

int cmd_verify(const std::string& path, double tolerance) {
  std::ifstream in(path);
  if (!in) throw ddsgps::ConfigError(path + ": cannot open");
  const auto report = ddsgps::verify_csv(ddsgps::read_csv(in), tolerance);
  std::cout << "rows: " << report.rows << "\nmax identity residual: " << ddsgps::format_real(report.max_identity_residual)
            << '\n';
  for (const auto& f : report.failures) std::cout << "FAIL " << f << '\n';
  std::cout << (report.ok() ? "OK" : "FAILED") << '\n';
  return report.ok() ? 0 : 1;
}

int cmd_oracle(const std::string& path) {
  const auto cfg = ddsgps::load_config(path);
  const auto inst = cfg.instance();
  const auto primary = ddsgps::solve(inst);
  auto j = ddsgps::oracle_to_json(primary);
  j["method"] = ddsgps::is_scalar_coupling(inst) ? "bisection" : "dual-ascent";
  if (ddsgps::is_scalar_coupling(inst)) {
    const auto check = ddsgps::solve_general_small(inst);
    j["cross_check"] = {{"method", "dual-ascent"},
                        {"f_star", check.f_star},
                        {"relative_difference", std::abs(check.f_star - primary.f_star) /
                                                    std::max(1.0, std::abs(primary.f_star))}};
  }
  std::cout << j.dump(2) << '\n';
  return primary.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed dual subgradient push-sum simulator"};
  app.require_subcommand(1);

  std::string run_path;
  std::optional<std::uint64_t> iterations, seed;
  std::optional<double> c;
  std::optional<std::string> out, summary;
  std::optional<unsigned> threads;
  auto* run = app.add_subcommand("run", "Run a configured experiment");
  run->add_option("config", run_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--iterations", iterations, "Override the iteration budget T");
  run->add_option("--seed", seed, "Override the schedule seed");
  run->add_option("--c", c, "Override the stepsize constant c");
  run->add_option("--out", out, "Override the CSV output path");
  run->add_option("--summary", summary, "Override the summary output path");
  run->add_option("--threads", threads, "Worker threads for per-agent updates");

  std::string csv_path;
  double tolerance = 1e-9;
  auto* verify = app.add_subcommand("verify", "Re-check a run's CSV offline");
  verify->add_option("csv", csv_path, "Per-round CSV written by 'run'")->required();
  verify->add_option("--tolerance", tolerance, "Identity residual tolerance");

  std::string oracle_path;
  auto* oracle = app.add_subcommand("oracle", "Solve the configured problem centrally");
  oracle->add_option("config", oracle_path, "YAML run configuration")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_path, iterations, seed, c, out, summary, threads);
    if (*verify) return cmd_verify(csv_path, tolerance);
    if (*oracle) return cmd_oracle(oracle_path);
  } catch (const ddsgps::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
