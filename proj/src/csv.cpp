#include "ddsgps/csv.hpp"

#include "ddsgps/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace ddsgps {

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const IterationRecord& r) {
  out << r.t << ',' << format_real(r.beta) << ',' << format_real(r.objective_hat) << ','
      << (r.objective_gap ? format_real(*r.objective_gap) : "") << ',' << format_real(r.violation_norm) << ','
      << format_real(r.consensus_spread) << ',' << (r.dual_distance ? format_real(*r.dual_distance) : "") << ','
      << format_real(r.identity_residual) << '\n';
}

void write_csv_footer(std::ostream& out, const OracleResult& oracle) {
  out << "# f_star=" << format_real(oracle.f_star) << '\n';
  out << "# lambda_star=";
  for (Eigen::Index k = 0; k < oracle.lambda_star.size(); ++k) {
    if (k) out << ';';
    out << format_real(oracle.lambda_star[k]);
  }
  out << '\n';
  out << "# oracle_residual=" << format_real(oracle.residual) << '\n';
}

namespace {

double parse_real(std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("line " + std::to_string(line) + ": cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

std::optional<double> parse_optional(std::string_view text, std::size_t line) {
  if (text.empty()) return std::nullopt;
  return parse_real(text, line);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

}  // namespace

CsvFile read_csv(std::istream& in) {
  CsvFile file;
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = std::string_view(line).substr(1);
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      auto key = body.substr(0, eq);
      while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
      const auto value = body.substr(eq + 1);
      if (key == "f_star") {
        file.f_star = parse_real(value, number);
      } else if (key == "oracle_residual") {
        file.oracle_residual = parse_real(value, number);
      } else if (key == "lambda_star") {
        for (auto part : split(value, ';')) file.lambda_star.push_back(parse_real(part, number));
      }
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw ConfigError("line " + std::to_string(number) + ": unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 8) {
      throw ConfigError("line " + std::to_string(number) + ": expected 8 fields, got " + std::to_string(cells.size()));
    }
    CsvRow row;
    const auto t_res = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), row.t);
    if (t_res.ec != std::errc() || t_res.ptr != cells[0].data() + cells[0].size()) {
      throw ConfigError("line " + std::to_string(number) + ": bad round index '" + std::string(cells[0]) + "'");
    }
    row.beta = parse_real(cells[1], number);
    row.objective_hat = parse_real(cells[2], number);
    row.objective_gap = parse_optional(cells[3], number);
    row.violation_norm = parse_real(cells[4], number);
    row.consensus_spread = parse_real(cells[5], number);
    row.dual_distance = parse_optional(cells[6], number);
    row.identity_residual = parse_real(cells[7], number);
    file.rows.push_back(row);
  }
  if (!header_seen) throw ConfigError("line " + std::to_string(number) + ": missing CSV header");
  return file;
}

VerifyReport verify_csv(const CsvFile& file, double identity_tolerance) {
  VerifyReport report;
  report.rows = file.rows.size();
  auto fail = [&](std::uint64_t t, const std::string& what) {
    report.failures.push_back("t=" + std::to_string(t) + ": " + what);
  };
  if (file.rows.empty()) report.failures.push_back("no rows");

  std::optional<double> implied_f_star = file.f_star;
  for (std::size_t k = 0; k < file.rows.size(); ++k) {
    const auto& r = file.rows[k];
    if (k > 0 && r.t != file.rows[k - 1].t + 1) fail(r.t, "round index not consecutive");
    if (!(r.beta > 0.0)) fail(r.t, "stepsize not positive");
    if (!(r.violation_norm >= 0.0)) fail(r.t, "negative violation norm");
    if (!(r.consensus_spread >= 0.0)) fail(r.t, "negative consensus spread");
    if (r.dual_distance && !(*r.dual_distance >= 0.0)) fail(r.t, "negative dual distance");
    if (!(r.identity_residual >= 0.0 && r.identity_residual <= identity_tolerance)) {
      fail(r.t, "identity residual " + format_real(r.identity_residual) + " exceeds " + format_real(identity_tolerance));
    }
    report.max_identity_residual = std::max(report.max_identity_residual, r.identity_residual);
    if (r.objective_gap) {
      const double f_star = r.objective_hat - *r.objective_gap;
      if (!implied_f_star) implied_f_star = f_star;
      const double scale = std::max({1.0, std::abs(*implied_f_star), std::abs(r.objective_hat)});
      if (std::abs(f_star - *implied_f_star) > 1e-12 * scale) fail(r.t, "objective_hat - objective_gap drifts from f_star");
    }
  }
  return report;
}

}  // namespace ddsgps
