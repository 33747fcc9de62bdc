#pragma once

// Run configuration (YAML) and the experiment driver behind the CLI.
//
//   problem:    {builtin: ieee57} or {agents: [...]}
//   schedule:   {kind, m, B, seed, edges}
//   stepsize:   {kind, c, table}
//   iterations: T
//   mu0:        zero | [[...], ...]
//   outputs:    {csv, summary, trace}
//   tolerances: {consensus, violation}
//   threads:    worker count for per-agent updates

#include "ddsgps/graph.hpp"
#include "ddsgps/oracle.hpp"
#include "ddsgps/pushsum.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ddsgps {

struct ProblemConfig {
  std::optional<std::string> builtin;
  ProblemInstance inline_instance;
};

struct ScheduleConfig {
  ScheduleKind kind = ScheduleKind::Static;
  std::size_t m = 0;
  std::size_t B = 1;
  std::uint64_t seed = 0;
  std::optional<std::vector<Edge>> edges;  // static only; 0-based here, 1-based in the file
};

struct StepsizeConfig {
  StepsizeKind kind = StepsizeKind::InverseSqrt;
  double c = 2.0;
  std::vector<double> table;
};

struct OutputConfig {
  std::string csv;
  std::string summary;
  std::string trace;
};

struct ToleranceConfig {
  std::optional<double> consensus;
  std::optional<double> violation;
};

struct RunConfig {
  ProblemConfig problem;
  ScheduleConfig schedule;
  StepsizeConfig stepsize;
  std::uint64_t iterations = 1500;
  std::optional<std::vector<Vector>> mu0;  // nullopt: zero
  OutputConfig outputs;
  ToleranceConfig tolerances;
  unsigned threads = 1;

  ProblemInstance instance() const;
  GraphSchedule graph_schedule() const;
  StepsizeSchedule stepsize_schedule() const;
  std::vector<Vector> initial_mu() const;

  /// Cross-field checks; throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses YAML text. `source` prefixes error messages ("<source>:<line>: ...").
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Canonical YAML form: fixed key order, every field explicit, reals with 17
/// significant digits.
std::string serialize_config(const RunConfig& cfg);

struct ExperimentSummary {
  std::optional<OracleResult> oracle;
  std::optional<double> final_gap;
  double final_violation = 0.0;
  double final_spread = 0.0;
  std::optional<double> final_dual_distance;
  std::uint64_t iterations_used = 0;
  bool early_exit = false;
  double wall_time_seconds = 0.0;
  std::vector<std::string> invariant_failures;
  std::vector<std::string> warnings;

  int exit_status() const { return invariant_failures.empty() ? 0 : 3; }
  nlohmann::json to_json() const;
};

/// Solves the oracle, runs the simulation, checks per-round invariants and
/// writes the configured CSV, summary and trace files.
ExperimentSummary run_experiment(const RunConfig& cfg);

nlohmann::json oracle_to_json(const OracleResult& result);

}  // namespace ddsgps
