#include "ddsgps/config.hpp"

#include "ddsgps/benchmark.hpp"
#include "ddsgps/csv.hpp"
#include "ddsgps/errors.hpp"
#include "ddsgps/runner.hpp"

#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace ddsgps {

namespace {

// Field-path aware YAML readers. Errors carry "<source>:<line>: <field>: ...".
class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) const {
    std::string where = source_;
    if (node.IsDefined() && node.Mark().line >= 0) where += ":" + std::to_string(node.Mark().line + 1);
    throw ConfigError(where + ": " + field + ": " + what);
  }

  void only_keys(const YAML::Node& node, const std::string& field, std::initializer_list<const char*> keys) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
    }
  }

  double real(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, field, "expected a number, got '" + node.Scalar() + "'");
    }
  }

  std::uint64_t count(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a non-negative integer");
    const std::string& text = node.Scalar();
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
      fail(node, field, "expected a non-negative integer, got '" + text + "'");
    }
    try {
      return node.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail(node, field, "integer out of range");
    }
  }

  std::string text(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a string");
    return node.Scalar();
  }

  // A scalar is accepted as a length-1 vector.
  Vector vector(const YAML::Node& node, const std::string& field) const {
    if (node.IsScalar()) return Vector::Constant(1, real(node, field));
    if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
    Vector v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t k = 0; k < node.size(); ++k) v[static_cast<Eigen::Index>(k)] = real(node[k], field + "[" + std::to_string(k) + "]");
    return v;
  }

  // A scalar is a 1x1 matrix; a flat list is a single row.
  Matrix matrix(const YAML::Node& node, const std::string& field) const {
    if (node.IsScalar()) return Matrix::Constant(1, 1, real(node, field));
    if (!node.IsSequence() || node.size() == 0) fail(node, field, "expected a list of rows");
    if (!node[0].IsSequence()) {
      const Vector row = vector(node, field);
      return row.transpose();
    }
    const std::size_t cols = node[0].size();
    Matrix out(static_cast<Eigen::Index>(node.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < node.size(); ++r) {
      const Vector row = vector(node[r], field + "[" + std::to_string(r) + "]");
      if (static_cast<std::size_t>(row.size()) != cols) fail(node[r], field, "ragged matrix rows");
      out.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return out;
  }

 private:
  std::string source_;
};

AgentProblem parse_agent(const Reader& rd, const YAML::Node& node, const std::string& field) {
  rd.only_keys(node, field, {"objective", "box", "coupling_matrix", "coupling_offset"});
  AgentProblem agent;
  const auto obj = node["objective"];
  if (!obj) rd.fail(node, field + ".objective", "missing");
  rd.only_keys(obj, field + ".objective", {"a", "b", "c"});
  agent.objective.a = rd.vector(obj["a"], field + ".objective.a");
  agent.objective.b = obj["b"] ? rd.vector(obj["b"], field + ".objective.b") : Vector::Zero(agent.objective.a.size());
  agent.objective.c = obj["c"] ? rd.real(obj["c"], field + ".objective.c") : 0.0;
  const auto box = node["box"];
  if (!box) rd.fail(node, field + ".box", "missing");
  rd.only_keys(box, field + ".box", {"lo", "hi"});
  agent.box.lo = rd.vector(box["lo"], field + ".box.lo");
  agent.box.hi = rd.vector(box["hi"], field + ".box.hi");
  if (!node["coupling_matrix"]) rd.fail(node, field + ".coupling_matrix", "missing");
  if (!node["coupling_offset"]) rd.fail(node, field + ".coupling_offset", "missing");
  agent.coupling_matrix = rd.matrix(node["coupling_matrix"], field + ".coupling_matrix");
  agent.coupling_offset = rd.vector(node["coupling_offset"], field + ".coupling_offset");
  try {
    agent.validate();
  } catch (const ConfigError& e) {
    rd.fail(node, field, e.what());
  }
  return agent;
}

YAML::Node real_node(double v) { return YAML::Node(format_real(v)); }

YAML::Node vector_node(const Vector& v) {
  YAML::Node out(YAML::NodeType::Sequence);
  out.SetStyle(YAML::EmitterStyle::Flow);
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(real_node(v[k]));
  return out;
}

YAML::Node matrix_node(const Matrix& m) {
  YAML::Node out(YAML::NodeType::Sequence);
  out.SetStyle(YAML::EmitterStyle::Flow);
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_node(m.row(r).transpose()));
  return out;
}

}  // namespace

ProblemInstance RunConfig::instance() const {
  if (problem.builtin) return builtin_problem(*problem.builtin);
  return problem.inline_instance;
}

GraphSchedule RunConfig::graph_schedule() const {
  switch (schedule.kind) {
    case ScheduleKind::Static:
      return schedule.edges ? GraphSchedule::static_edges(schedule.m, *schedule.edges)
                            : GraphSchedule::static_ring(schedule.m);
    case ScheduleKind::RingRotation:
      return GraphSchedule::ring_rotation(schedule.m);
    case ScheduleKind::RandomWindow:
      return GraphSchedule::random_window(schedule.m, schedule.B, schedule.seed);
  }
  throw ConfigError("schedule.kind: unsupported");
}

StepsizeSchedule RunConfig::stepsize_schedule() const {
  switch (stepsize.kind) {
    case StepsizeKind::InverseSqrt: return StepsizeSchedule::inverse_sqrt(stepsize.c);
    case StepsizeKind::Constant: return StepsizeSchedule::constant(stepsize.c);
    case StepsizeKind::Table: return StepsizeSchedule::table(stepsize.table);
  }
  throw ConfigError("stepsize.kind: unsupported");
}

std::vector<Vector> RunConfig::initial_mu() const {
  if (mu0) return *mu0;
  return zero_mu0(instance());
}

void RunConfig::validate() const {
  const ProblemInstance inst = instance();
  try {
    inst.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  if (schedule.m != inst.size()) {
    throw ConfigError("schedule.m: " + std::to_string(schedule.m) + " does not match the problem's " +
                      std::to_string(inst.size()) + " agents");
  }
  if (schedule.B == 0) throw ConfigError("schedule.B: must be positive");
  if (schedule.edges && schedule.kind != ScheduleKind::Static) {
    throw ConfigError("schedule.edges: only valid for static schedules");
  }
  if (iterations == 0) throw ConfigError("iterations: must be at least 1");
  if (stepsize.kind == StepsizeKind::Table) {
    if (stepsize.table.size() < iterations) {
      throw ConfigError("stepsize.table: has " + std::to_string(stepsize.table.size()) + " entries, need " +
                        std::to_string(iterations));
    }
  } else if (!(stepsize.c > 0.0) || !std::isfinite(stepsize.c)) {
    throw ConfigError("stepsize.c: must be positive");
  }
  if (mu0) {
    if (mu0->size() != inst.size()) throw ConfigError("mu0: expected one vector per agent");
    for (const auto& v : *mu0) {
      if (static_cast<std::size_t>(v.size()) != inst.coupling_dim) {
        throw ConfigError("mu0: vectors must have length " + std::to_string(inst.coupling_dim));
      }
    }
  }
  if (tolerances.consensus && !(*tolerances.consensus > 0.0)) throw ConfigError("tolerances.consensus: must be positive");
  if (tolerances.violation && !(*tolerances.violation > 0.0)) throw ConfigError("tolerances.violation: must be positive");
  if (threads == 0) throw ConfigError("threads: must be at least 1");
  graph_schedule();
  stepsize_schedule();
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": parse error: " + e.msg);
  }
  const Reader rd(source);
  if (!root.IsMap()) rd.fail(root, "<root>", "expected a mapping at the top level");
  rd.only_keys(root, "", {"problem", "schedule", "stepsize", "iterations", "mu0", "outputs", "tolerances", "threads"});

  RunConfig cfg;
  const auto problem = root["problem"];
  if (!problem) rd.fail(root, "problem", "missing");
  if (problem.IsScalar()) {
    cfg.problem.builtin = problem.Scalar();
  } else {
    rd.only_keys(problem, "problem", {"builtin", "agents"});
    if (problem["builtin"] && problem["agents"]) rd.fail(problem, "problem", "give either builtin or agents");
    if (problem["builtin"]) {
      cfg.problem.builtin = rd.text(problem["builtin"], "problem.builtin");
    } else {
      const auto agents = problem["agents"];
      if (!agents || !agents.IsSequence() || agents.size() == 0) rd.fail(problem, "problem.agents", "expected a non-empty list");
      for (std::size_t i = 0; i < agents.size(); ++i) {
        cfg.problem.inline_instance.agents.push_back(
            parse_agent(rd, agents[i], "problem.agents[" + std::to_string(i) + "]"));
      }
      cfg.problem.inline_instance.coupling_dim = cfg.problem.inline_instance.agents.front().coupling_dim();
    }
  }
  if (cfg.problem.builtin) {
    try {
      builtin_problem(*cfg.problem.builtin);
    } catch (const ConfigError& e) {
      rd.fail(problem, "problem.builtin", e.what());
    }
  }
  const std::size_t agent_count = cfg.instance().size();

  cfg.schedule.m = agent_count;
  if (const auto s = root["schedule"]) {
    rd.only_keys(s, "schedule", {"kind", "m", "B", "seed", "edges"});
    if (s["kind"]) {
      try {
        cfg.schedule.kind = parse_schedule_kind(rd.text(s["kind"], "schedule.kind"));
      } catch (const ConfigError& e) {
        rd.fail(s["kind"], "schedule.kind", e.what());
      }
    }
    if (s["m"]) cfg.schedule.m = static_cast<std::size_t>(rd.count(s["m"], "schedule.m"));
    if (s["seed"]) cfg.schedule.seed = rd.count(s["seed"], "schedule.seed");
    if (s["edges"]) {
      const auto edges = s["edges"];
      if (!edges.IsSequence()) rd.fail(edges, "schedule.edges", "expected a list of [from, to] pairs");
      std::vector<Edge> list;
      for (std::size_t k = 0; k < edges.size(); ++k) {
        const std::string field = "schedule.edges[" + std::to_string(k) + "]";
        const auto e = edges[k];
        if (!e.IsSequence() || e.size() != 2) rd.fail(e, field, "expected [from, to]");
        const auto from = rd.count(e[0], field), to = rd.count(e[1], field);
        if (from < 1 || to < 1 || from > cfg.schedule.m || to > cfg.schedule.m) {
          rd.fail(e, field, "endpoints must lie in 1.." + std::to_string(cfg.schedule.m));
        }
        list.push_back({static_cast<std::size_t>(from - 1), static_cast<std::size_t>(to - 1)});
      }
      cfg.schedule.edges = std::move(list);
    }
    if (s["B"]) {
      cfg.schedule.B = static_cast<std::size_t>(rd.count(s["B"], "schedule.B"));
    } else {
      cfg.schedule.B = cfg.schedule.kind == ScheduleKind::Static ? 1 : cfg.schedule.m;
    }
  }

  if (const auto s = root["stepsize"]) {
    rd.only_keys(s, "stepsize", {"kind", "c", "table"});
    if (s["kind"]) {
      try {
        cfg.stepsize.kind = parse_stepsize_kind(rd.text(s["kind"], "stepsize.kind"));
      } catch (const ConfigError& e) {
        rd.fail(s["kind"], "stepsize.kind", e.what());
      }
    }
    if (s["c"]) cfg.stepsize.c = rd.real(s["c"], "stepsize.c");
    if (s["table"]) {
      const Vector v = rd.vector(s["table"], "stepsize.table");
      cfg.stepsize.table.assign(v.data(), v.data() + v.size());
    }
  }

  if (root["iterations"]) cfg.iterations = rd.count(root["iterations"], "iterations");

  if (const auto mu = root["mu0"]) {
    if (mu.IsScalar()) {
      if (mu.Scalar() != "zero") rd.fail(mu, "mu0", "expected 'zero' or a list of per-agent vectors");
    } else {
      if (!mu.IsSequence()) rd.fail(mu, "mu0", "expected 'zero' or a list of per-agent vectors");
      std::vector<Vector> list;
      for (std::size_t i = 0; i < mu.size(); ++i) list.push_back(rd.vector(mu[i], "mu0[" + std::to_string(i) + "]"));
      cfg.mu0 = std::move(list);
    }
  }

  if (const auto o = root["outputs"]) {
    rd.only_keys(o, "outputs", {"csv", "summary", "trace"});
    if (o["csv"]) cfg.outputs.csv = rd.text(o["csv"], "outputs.csv");
    if (o["summary"]) cfg.outputs.summary = rd.text(o["summary"], "outputs.summary");
    if (o["trace"]) cfg.outputs.trace = rd.text(o["trace"], "outputs.trace");
  }

  if (const auto tol = root["tolerances"]) {
    rd.only_keys(tol, "tolerances", {"consensus", "violation"});
    if (tol["consensus"]) cfg.tolerances.consensus = rd.real(tol["consensus"], "tolerances.consensus");
    if (tol["violation"]) cfg.tolerances.violation = rd.real(tol["violation"], "tolerances.violation");
  }

  if (root["threads"]) cfg.threads = static_cast<unsigned>(rd.count(root["threads"], "threads"));

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

std::string serialize_config(const RunConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  out << YAML::Key << "problem" << YAML::Value << YAML::BeginMap;
  if (cfg.problem.builtin) {
    out << YAML::Key << "builtin" << YAML::Value << *cfg.problem.builtin;
  } else {
    out << YAML::Key << "agents" << YAML::Value << YAML::BeginSeq;
    for (const auto& agent : cfg.problem.inline_instance.agents) {
      out << YAML::BeginMap;
      out << YAML::Key << "objective" << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "a" << YAML::Value << vector_node(agent.objective.a);
      out << YAML::Key << "b" << YAML::Value << vector_node(agent.objective.b);
      out << YAML::Key << "c" << YAML::Value << format_real(agent.objective.c);
      out << YAML::EndMap;
      out << YAML::Key << "box" << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "lo" << YAML::Value << vector_node(agent.box.lo);
      out << YAML::Key << "hi" << YAML::Value << vector_node(agent.box.hi);
      out << YAML::EndMap;
      out << YAML::Key << "coupling_matrix" << YAML::Value << matrix_node(agent.coupling_matrix);
      out << YAML::Key << "coupling_offset" << YAML::Value << vector_node(agent.coupling_offset);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  out << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(cfg.schedule.kind));
  out << YAML::Key << "m" << YAML::Value << cfg.schedule.m;
  out << YAML::Key << "B" << YAML::Value << cfg.schedule.B;
  out << YAML::Key << "seed" << YAML::Value << cfg.schedule.seed;
  if (cfg.schedule.edges) {
    out << YAML::Key << "edges" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& e : *cfg.schedule.edges) {
      out << YAML::Flow << YAML::BeginSeq << e.from + 1 << e.to + 1 << YAML::EndSeq;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  out << YAML::Key << "stepsize" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(cfg.stepsize.kind));
  if (cfg.stepsize.kind == StepsizeKind::Table) {
    Vector v = Eigen::Map<const Vector>(cfg.stepsize.table.data(), static_cast<Eigen::Index>(cfg.stepsize.table.size()));
    out << YAML::Key << "table" << YAML::Value << vector_node(v);
  } else {
    out << YAML::Key << "c" << YAML::Value << format_real(cfg.stepsize.c);
  }
  out << YAML::EndMap;

  out << YAML::Key << "iterations" << YAML::Value << cfg.iterations;

  out << YAML::Key << "mu0" << YAML::Value;
  if (cfg.mu0) {
    out << YAML::BeginSeq;
    for (const auto& v : *cfg.mu0) out << vector_node(v);
    out << YAML::EndSeq;
  } else {
    out << "zero";
  }

  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "csv" << YAML::Value << YAML::DoubleQuoted << cfg.outputs.csv;
  out << YAML::Key << "summary" << YAML::Value << YAML::DoubleQuoted << cfg.outputs.summary;
  out << YAML::Key << "trace" << YAML::Value << YAML::DoubleQuoted << cfg.outputs.trace;
  out << YAML::EndMap;

  if (cfg.tolerances.consensus || cfg.tolerances.violation) {
    out << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
    if (cfg.tolerances.consensus) out << YAML::Key << "consensus" << YAML::Value << format_real(*cfg.tolerances.consensus);
    if (cfg.tolerances.violation) out << YAML::Key << "violation" << YAML::Value << format_real(*cfg.tolerances.violation);
    out << YAML::EndMap;
  }

  out << YAML::Key << "threads" << YAML::Value << cfg.threads;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

nlohmann::json oracle_to_json(const OracleResult& result) {
  nlohmann::json j;
  j["f_star"] = result.f_star;
  j["lambda_star"] = std::vector<double>(result.lambda_star.data(), result.lambda_star.data() + result.lambda_star.size());
  j["residual"] = result.residual;
  j["converged"] = result.converged;
  j["iterations"] = result.iterations;
  auto& xs = j["x_star"] = nlohmann::json::array();
  for (const auto& x : result.x_star) xs.push_back(std::vector<double>(x.data(), x.data() + x.size()));
  return j;
}

nlohmann::json ExperimentSummary::to_json() const {
  nlohmann::json j;
  if (oracle) {
    j["f_star"] = oracle->f_star;
    j["lambda_star"] = std::vector<double>(oracle->lambda_star.data(), oracle->lambda_star.data() + oracle->lambda_star.size());
    j["oracle_residual"] = oracle->residual;
  } else {
    j["f_star"] = nullptr;
  }
  j["final_gap"] = final_gap ? nlohmann::json(*final_gap) : nlohmann::json(nullptr);
  j["final_violation"] = final_violation;
  j["final_spread"] = final_spread;
  j["final_dual_distance"] = final_dual_distance ? nlohmann::json(*final_dual_distance) : nlohmann::json(nullptr);
  j["iterations_used"] = iterations_used;
  j["early_exit"] = early_exit;
  j["wall_time_seconds"] = wall_time_seconds;
  j["invariant_failures"] = invariant_failures;
  j["warnings"] = warnings;
  return j;
}

namespace {

constexpr double kIdentityTolerance = 1e-9;
constexpr double kDescentSlack = 1e-9;
constexpr std::size_t kMaxReportedFailures = 20;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

}  // namespace

ExperimentSummary run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  ExperimentSummary summary;

  const ProblemInstance inst = cfg.instance();
  const StepsizeSchedule stepsize = cfg.stepsize_schedule();
  if (!stepsize.satisfies_decay_conditions()) {
    summary.warnings.push_back("stepsize kind '" + std::string(to_string(stepsize.kind())) +
                               "' does not satisfy the diminishing-stepsize conditions");
  }

  OracleResult oracle = solve(inst);
  if (oracle.converged) {
    summary.oracle = std::move(oracle);
  } else {
    summary.warnings.push_back("oracle did not converge (residual " + format_real(oracle.residual) +
                               "); gap and dual distance omitted");
  }

  std::optional<std::ofstream> csv, trace;
  if (!cfg.outputs.csv.empty()) {
    csv = open_output(cfg.outputs.csv);
    write_csv_header(*csv);
  }
  if (!cfg.outputs.trace.empty()) {
    trace = open_output(cfg.outputs.trace);
    *trace << "t,from,to,nu_share,mu_share\n";
  }

  RunOptions options;
  options.iterations = cfg.iterations;
  options.consensus_tolerance = cfg.tolerances.consensus;
  options.violation_tolerance = cfg.tolerances.violation;
  options.simulation.threads = cfg.threads;
  options.simulation.trace_messages = trace.has_value();
  options.keep_records = false;

  const double m = static_cast<double>(inst.size());
  auto report = [&](std::uint64_t t, const std::string& what) {
    if (summary.invariant_failures.size() < kMaxReportedFailures) {
      summary.invariant_failures.push_back("t=" + std::to_string(t) + ": " + what);
    }
  };
  auto observer = [&](const Simulation& sim, const IterationRecord& rec) {
    if (csv) write_csv_row(*csv, rec);
    if (trace) {
      for (const auto& msg : sim.last_messages()) {
        *trace << rec.t - 1 << ',' << msg.from + 1 << ',' << msg.to + 1 << ',' << format_real(msg.nu_share) << ',';
        for (Eigen::Index k = 0; k < msg.mu_share.size(); ++k) {
          if (k) *trace << ';';
          *trace << format_real(msg.mu_share[k]);
        }
        *trace << '\n';
      }
    }
    if (!(rec.identity_residual <= kIdentityTolerance)) report(rec.t, "constraint-violation identity residual " + format_real(rec.identity_residual));
    if (!(rec.mean_dual_residual <= kIdentityTolerance)) report(rec.t, "mean-dual recursion residual " + format_real(rec.mean_dual_residual));
    if (!(std::abs(rec.nu_sum - m) <= 1e-12 * m)) report(rec.t, "push-sum weights sum to " + format_real(rec.nu_sum));
    if (rec.descent_margin && !(*rec.descent_margin >= -kDescentSlack)) report(rec.t, "descent inequality margin " + format_real(*rec.descent_margin));
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (!inst.agents[i].box.contains(sim.states()[i].x)) report(rec.t, "agent " + std::to_string(i + 1) + " left its box");
    }
  };

  const RunOutcome outcome =
      run(inst, cfg.graph_schedule(), stepsize, cfg.initial_mu(), options, summary.oracle, observer);

  if (csv) {
    if (summary.oracle) write_csv_footer(*csv, *summary.oracle);
    csv->flush();
    if (!*csv) throw std::runtime_error(cfg.outputs.csv + ": write failed");
  }

  summary.final_gap = outcome.last.objective_gap;
  summary.final_violation = outcome.last.violation_norm;
  summary.final_spread = outcome.last.consensus_spread;
  summary.final_dual_distance = outcome.last.dual_distance;
  summary.iterations_used = outcome.rounds;
  summary.early_exit = outcome.early_exit;
  summary.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (!cfg.outputs.summary.empty()) {
    auto out = open_output(cfg.outputs.summary);
    out << summary.to_json().dump(2) << '\n';
  }
  return summary;
}

}  // namespace ddsgps
