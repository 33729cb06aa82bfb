#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kirchhoff/asymptotics.hpp"
#include "kirchhoff/coefficient.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/integrator.hpp"
#include "kirchhoff/spectrum.hpp"

namespace kirchhoff {

/// Malformed or inconsistent run configuration.
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

inline constexpr int kConfigSchemaVersion = 1;

/// Flat run configuration. Every field has a fixed default, so the effective configuration is
/// fully determined by the document and is echoed in every output.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;

  // Spectrum: either explicit frequencies or a named preset.
  std::vector<double> eigenvalues;
  std::string preset;  // "" or "laplacian"
  int preset_count = 0;
  double preset_length = 0.0;

  double gamma = 1.0;
  double epsilon = 0.05;
  std::vector<double> u0;
  /// Empty means zero initial velocity.
  std::vector<double> u1;
  double t_end = 1e5;

  // Step controller and sampling.
  double eta_b = 1e-3;
  double dt_min = 1e-12;
  double dt_max_factor = 0.1;
  double flush_threshold = 1e-300;
  int samples_per_decade = 20;
  double t_first = 1e-3;

  // Verification.
  /// Empty means every distinct frequency ≥ ν.
  std::vector<double> theorem1_lambdas;
  std::optional<double> tolerance;
  double velocity_tolerance = 0.05;
  double slope_tolerance = 0.05;
  double window_decades = 1.0;
  double support_tolerance = 1e-3;
  /// Claim-id filter; a filter matches an id equal to it or starting with it plus ':'.
  std::vector<std::string> claims;

  // Linear runs.
  std::string coefficient = "power";  // "power" or "constant"
  double coefficient_K = 1.0;
  double coefficient_p = 1.0;
  /// Unset means the smallest frequency.
  std::optional<double> sigma_M;

  // Sweeps.
  std::vector<double> sweep_epsilon;
  std::vector<double> sweep_gamma;

  std::string out = "out";
  int threads = 1;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError on unknown keys, wrong types, or a schema_version other than 1.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
/// Every field, defaults included; parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& config);

Spectrum resolve_spectrum(const RunConfig& config);
/// u1 defaults to zeros of the right length.
Problem to_problem(const RunConfig& config);
StepController to_controller(const RunConfig& config);
SamplingPolicy to_sampling(const RunConfig& config);
VerifySettings to_verify_settings(const RunConfig& config);
LinearCoefficient to_coefficient(const RunConfig& config);

}  // namespace kirchhoff
