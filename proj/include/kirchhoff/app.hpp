#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kirchhoff/asymptotics.hpp"
#include "kirchhoff/config.hpp"
#include "kirchhoff/trace.hpp"

namespace kirchhoff::app {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitClaimFailed = 1,
  kExitConfig = 2,
  kExitNumeric = 3,
};

/// Fixed CSV header of trace files.
const std::string& csv_header();
void write_trace_csv(std::ostream& out, const Trace& trace);

nlohmann::json report_to_json(const VerificationReport& report);
/// Effective configuration plus resolved quantities (eigenvalues, ν, b₀).
nlohmann::json metadata_json(const RunConfig& config);
/// Recovers the effective configuration from a metadata document.
RunConfig config_from_metadata(const nlohmann::json& metadata);

/// Keeps the claims matching the filter (exact id or id prefix followed by ':'); reports left
/// without claims are dropped. An empty filter keeps everything.
std::vector<VerificationReport> filter_claims(std::vector<VerificationReport> reports,
                                              const std::vector<std::string>& filter);

/// All verifiers applicable to a nonlinear trace.
std::vector<VerificationReport> verify_all(const Trace& trace, const RunConfig& config);

struct SweepRow {
  double epsilon = 0.0;
  double gamma = 0.0;
  /// "ok" or the error message of a failed run.
  std::string status;
  bool pass = false;
  std::optional<double> b_limit;
  std::optional<double> a12u_limit;
  std::optional<double> au_limit;
  std::optional<double> u_nu_limit;
  std::optional<double> du_limit;
  std::optional<double> a12du_limit;
};

/// One row per (ε, γ) point, in sweep order regardless of thread count. Throws ConfigError for
/// an empty sweep.
std::vector<SweepRow> run_sweep_rows(const RunConfig& config);

/// Subcommands. Each writes its outputs under config.out and returns an exit code; library
/// exceptions propagate.
int run_simulate(const RunConfig& config, std::ostream& log);
int run_verify(const RunConfig& config, std::ostream& log);
int run_linear(const RunConfig& config, std::ostream& log);
int run_sweep(const RunConfig& config, std::ostream& log);

/// Parses the command line and dispatches; maps exceptions to exit codes.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kirchhoff::app
