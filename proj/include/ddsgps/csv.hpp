#pragma once

// Per-round CSV stream and its offline verifier.
//
//   t,beta,objective_hat,objective_gap,violation_norm,consensus_spread,dual_distance,identity_residual
//
// Reals use 17 significant digits; gap and distance are empty without an
// oracle. An optional footer of "# key=value" lines carries the oracle result.

#include "ddsgps/metrics.hpp"
#include "ddsgps/oracle.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddsgps {

inline constexpr std::string_view kCsvHeader =
    "t,beta,objective_hat,objective_gap,violation_norm,consensus_spread,dual_distance,identity_residual";

/// "%.17g" rendering; round-trips every finite double.
std::string format_real(double v);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const IterationRecord& r);
void write_csv_footer(std::ostream& out, const OracleResult& oracle);

struct CsvRow {
  std::uint64_t t = 0;
  double beta = 0.0;
  double objective_hat = 0.0;
  std::optional<double> objective_gap;
  double violation_norm = 0.0;
  double consensus_spread = 0.0;
  std::optional<double> dual_distance;
  double identity_residual = 0.0;
};

struct CsvFile {
  std::vector<CsvRow> rows;
  std::optional<double> f_star;
  std::optional<double> oracle_residual;
  std::vector<double> lambda_star;
};

/// Throws ConfigError("line N: ...") on malformed input.
CsvFile read_csv(std::istream& in);

struct VerifyReport {
  std::size_t rows = 0;
  double max_identity_residual = 0.0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Offline checks: consecutive rounds, positive stepsizes, nonnegative norms,
/// identity residual within tolerance, and objective_hat - objective_gap
/// constant (equal to the footer's f_star when present).
VerifyReport verify_csv(const CsvFile& file, double identity_tolerance = 1e-9);

}  // namespace ddsgps
