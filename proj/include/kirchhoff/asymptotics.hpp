#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kirchhoff/trace.hpp"

namespace kirchhoff {

/// Two-window estimate of lim_{t→∞} of a sampled series.
struct LimitEstimate {
  /// Mean over the trailing window, weighted uniformly in ln t.
  double value = 0.0;
  /// Same over the trailing half window.
  double half_window_value = 0.0;
  /// |value − half_window_value|.
  double spread = 0.0;
  std::size_t samples = 0;
};

/// Samples with t < 1 are never used. Throws InsufficientTail with fewer than 8 samples in the
/// window, InvalidInput on a non-positive window.
LimitEstimate estimate_limit(std::span<const double> t, std::span<const double> value,
                             double window_decades = 1.0);

/// Least-squares slope of log_value against ln t over the trailing window (t ≥ 1). Samples with
/// non-finite log_value are skipped. Throws InsufficientTail with fewer than 8 usable samples.
double tail_slope(std::span<const double> t, std::span<const double> log_value,
                  double window_decades = 1.0);

enum class ClaimKind {
  /// measured → predicted: |measured − predicted| ≤ tol·|predicted| and spread ≤ tol/2·|predicted|.
  /// Without a prediction only the spread condition (relative to |measured|) applies.
  Limit,
  /// Log-slope over the tail ≤ tolerance (and ≥ −tolerance when two_sided).
  Bound,
  /// measured ≤ tolerance.
  Check,
  /// Witnessed infimum over the whole run (measured) strictly positive.
  Positive,
  /// Reported without a pass threshold; always passes.
  Info,
};

struct Claim {
  std::string id;
  ClaimKind kind = ClaimKind::Info;
  std::optional<double> predicted;
  /// Limit value, check statistic, or infimum (Positive). For Bound claims, the natural log of
  /// the supremum over the tail window, so that overflowing functionals stay reportable.
  double measured = 0.0;
  double half_window = 0.0;
  double spread = 0.0;
  /// Bound claims: tail slope of the log functional. Info claims: measured slope.
  std::optional<double> slope;
  /// Witnessed lower and upper constants over the tail, for bound claims.
  std::optional<double> lower;
  std::optional<double> upper;
  bool two_sided = false;
  double tolerance = 0.0;
  bool pass = false;
  /// The tail was too short to measure; the claim fails regardless of tolerance.
  bool insufficient_tail = false;
  /// Empty unless something noteworthy happened ("InsufficientTail", "vacuous", ...).
  std::string note;
};

/// Pass/fail of a claim from its measured fields and tolerance.
bool claim_passes(const Claim& claim);

struct VerificationReport {
  std::string name;
  std::vector<Claim> claims;
  /// Ordered key/value pairs echoing the problem and run settings.
  std::vector<std::pair<std::string, std::string>> metadata;

  bool all_pass() const;
  std::size_t failures() const;
};

struct VerifySettings {
  /// Limit-claim tolerance; unset means 2%, or 5% when γ < 1/2.
  std::optional<double> tolerance;
  /// Tolerance of the velocity limits, which converge more slowly.
  double velocity_tolerance = 0.05;
  double slope_tolerance = 0.05;
  double window_decades = 1.0;
  /// Off-band renormalized mass allowed in the limit pair, relative to |u_∞|².
  double support_tolerance = 1e-3;

  double limit_tolerance(double gamma) const;
};

/// Closed-form limiting constants for given (γ, ν).
struct LimitPredictions {
  double b = 0.0;            // (1+t)b
  double u_nu = 0.0;         // (1+t)^{1/γ}|u_ν|²
  double a12u = 0.0;         // (1+t)^{1/γ}|A^{1/2}u|²
  double au = 0.0;           // (1+t)^{1/γ}|Au|²
  double du = 0.0;           // (1+t)^{2+1/γ}|u′|²
  double a12du = 0.0;        // (1+t)^{2+1/γ}|A^{1/2}u′|²
};

LimitPredictions predict_limits(double gamma, double nu);

VerificationReport verify_theorem_A(const Trace& trace, const VerifySettings& settings = {});
/// Throws InvalidBand if some λ < ν.
VerificationReport verify_theorem_1(const Trace& trace, std::span<const double> lambdas,
                                    const VerifySettings& settings = {});
VerificationReport verify_theorem_2(const Trace& trace, const VerifySettings& settings = {});
VerificationReport verify_proposition_3(const Trace& trace, const VerifySettings& settings = {});
/// Linear traces. sigma_M must not exceed the smallest frequency (InvalidBand).
VerificationReport verify_propositions(const Trace& linear_trace, double sigma_M,
                                       const VerifySettings& settings = {});

}  // namespace kirchhoff
