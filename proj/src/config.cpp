#include "kirchhoff/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

namespace kirchhoff {

namespace {

using json = nlohmann::json;

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> as_doubles(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_double(x, key));
  return out;
}

std::vector<std::string> as_strings(const json& v, const std::string& key) {
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(as_string(x, key));
  return out;
}

std::optional<double> as_optional_double(const json& v, const std::string& key) {
  if (v.is_null()) return std::nullopt;
  return as_double(v, key);
}

using Setter = std::function<void(RunConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"schema_version", [](RunConfig& c, const json& v, const std::string& k) { c.schema_version = as_int(v, k); }},
      {"eigenvalues", [](RunConfig& c, const json& v, const std::string& k) { c.eigenvalues = as_doubles(v, k); }},
      {"preset", [](RunConfig& c, const json& v, const std::string& k) { c.preset = as_string(v, k); }},
      {"preset_count", [](RunConfig& c, const json& v, const std::string& k) { c.preset_count = as_int(v, k); }},
      {"preset_length", [](RunConfig& c, const json& v, const std::string& k) { c.preset_length = as_double(v, k); }},
      {"gamma", [](RunConfig& c, const json& v, const std::string& k) { c.gamma = as_double(v, k); }},
      {"epsilon", [](RunConfig& c, const json& v, const std::string& k) { c.epsilon = as_double(v, k); }},
      {"u0", [](RunConfig& c, const json& v, const std::string& k) { c.u0 = as_doubles(v, k); }},
      {"u1", [](RunConfig& c, const json& v, const std::string& k) { c.u1 = as_doubles(v, k); }},
      {"t_end", [](RunConfig& c, const json& v, const std::string& k) { c.t_end = as_double(v, k); }},
      {"eta_b", [](RunConfig& c, const json& v, const std::string& k) { c.eta_b = as_double(v, k); }},
      {"dt_min", [](RunConfig& c, const json& v, const std::string& k) { c.dt_min = as_double(v, k); }},
      {"dt_max_factor", [](RunConfig& c, const json& v, const std::string& k) { c.dt_max_factor = as_double(v, k); }},
      {"flush_threshold", [](RunConfig& c, const json& v, const std::string& k) { c.flush_threshold = as_double(v, k); }},
      {"samples_per_decade", [](RunConfig& c, const json& v, const std::string& k) { c.samples_per_decade = as_int(v, k); }},
      {"t_first", [](RunConfig& c, const json& v, const std::string& k) { c.t_first = as_double(v, k); }},
      {"theorem1_lambdas", [](RunConfig& c, const json& v, const std::string& k) { c.theorem1_lambdas = as_doubles(v, k); }},
      {"tolerance", [](RunConfig& c, const json& v, const std::string& k) { c.tolerance = as_optional_double(v, k); }},
      {"velocity_tolerance", [](RunConfig& c, const json& v, const std::string& k) { c.velocity_tolerance = as_double(v, k); }},
      {"slope_tolerance", [](RunConfig& c, const json& v, const std::string& k) { c.slope_tolerance = as_double(v, k); }},
      {"window_decades", [](RunConfig& c, const json& v, const std::string& k) { c.window_decades = as_double(v, k); }},
      {"support_tolerance", [](RunConfig& c, const json& v, const std::string& k) { c.support_tolerance = as_double(v, k); }},
      {"claims", [](RunConfig& c, const json& v, const std::string& k) { c.claims = as_strings(v, k); }},
      {"coefficient", [](RunConfig& c, const json& v, const std::string& k) { c.coefficient = as_string(v, k); }},
      {"coefficient_K", [](RunConfig& c, const json& v, const std::string& k) { c.coefficient_K = as_double(v, k); }},
      {"coefficient_p", [](RunConfig& c, const json& v, const std::string& k) { c.coefficient_p = as_double(v, k); }},
      {"sigma_M", [](RunConfig& c, const json& v, const std::string& k) { c.sigma_M = as_optional_double(v, k); }},
      {"sweep_epsilon", [](RunConfig& c, const json& v, const std::string& k) { c.sweep_epsilon = as_doubles(v, k); }},
      {"sweep_gamma", [](RunConfig& c, const json& v, const std::string& k) { c.sweep_gamma = as_doubles(v, k); }},
      {"out", [](RunConfig& c, const json& v, const std::string& k) { c.out = as_string(v, k); }},
      {"threads", [](RunConfig& c, const json& v, const std::string& k) { c.threads = as_int(v, k); }},
  };
  return table;
}

json optional_to_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, value, key);
  }
  if (cfg.schema_version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
  }
  if (!cfg.preset.empty() && cfg.preset != "laplacian") {
    throw ConfigError("unknown preset '" + cfg.preset + "'");
  }
  if (!cfg.preset.empty() && !cfg.eigenvalues.empty()) {
    throw ConfigError("give either eigenvalues or a preset, not both");
  }
  if (cfg.coefficient != "power" && cfg.coefficient != "constant") {
    throw ConfigError("coefficient must be 'power' or 'constant'");
  }
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) throw ConfigError("t_end must be positive");
  if (cfg.samples_per_decade < 1) throw ConfigError("samples_per_decade must be at least 1");
  if (!(cfg.t_first > 0.0)) throw ConfigError("t_first must be positive");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (!(cfg.window_decades > 0.0)) throw ConfigError("window_decades must be positive");
  if (cfg.tolerance && !(*cfg.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["eigenvalues"] = c.eigenvalues;
  j["preset"] = c.preset;
  j["preset_count"] = c.preset_count;
  j["preset_length"] = c.preset_length;
  j["gamma"] = c.gamma;
  j["epsilon"] = c.epsilon;
  j["u0"] = c.u0;
  j["u1"] = c.u1;
  j["t_end"] = c.t_end;
  j["eta_b"] = c.eta_b;
  j["dt_min"] = c.dt_min;
  j["dt_max_factor"] = c.dt_max_factor;
  j["flush_threshold"] = c.flush_threshold;
  j["samples_per_decade"] = c.samples_per_decade;
  j["t_first"] = c.t_first;
  j["theorem1_lambdas"] = c.theorem1_lambdas;
  j["tolerance"] = optional_to_json(c.tolerance);
  j["velocity_tolerance"] = c.velocity_tolerance;
  j["slope_tolerance"] = c.slope_tolerance;
  j["window_decades"] = c.window_decades;
  j["support_tolerance"] = c.support_tolerance;
  j["claims"] = c.claims;
  j["coefficient"] = c.coefficient;
  j["coefficient_K"] = c.coefficient_K;
  j["coefficient_p"] = c.coefficient_p;
  j["sigma_M"] = optional_to_json(c.sigma_M);
  j["sweep_epsilon"] = c.sweep_epsilon;
  j["sweep_gamma"] = c.sweep_gamma;
  j["out"] = c.out;
  j["threads"] = c.threads;
  return j;
}

Spectrum resolve_spectrum(const RunConfig& c) {
  if (c.preset == "laplacian") {
    if (c.preset_count < 1 || !(c.preset_length > 0.0)) {
      throw ConfigError("laplacian preset needs preset_count >= 1 and preset_length > 0");
    }
    return laplacian_interval_spectrum(c.preset_count, c.preset_length);
  }
  if (c.eigenvalues.empty()) throw ConfigError("config needs eigenvalues or a preset");
  Vector sorted = c.eigenvalues;
  std::sort(sorted.begin(), sorted.end());
  return Spectrum(std::move(sorted));
}

Problem to_problem(const RunConfig& c) {
  // Explicit eigenvalues keep their order so that u0/u1 stay aligned; build_problem sorts.
  Vector freqs = c.eigenvalues;
  if (freqs.empty()) {
    const Spectrum spectrum = resolve_spectrum(c);
    freqs.assign(spectrum.frequencies().begin(), spectrum.frequencies().end());
  }
  Vector u1 = c.u1.empty() ? Vector(c.u0.size(), 0.0) : c.u1;
  return build_problem(std::move(freqs), c.gamma, c.epsilon, c.u0, std::move(u1));
}

StepController to_controller(const RunConfig& c) {
  StepController ctrl;
  ctrl.eta_b = c.eta_b;
  ctrl.dt_min = c.dt_min;
  ctrl.dt_max_factor = c.dt_max_factor;
  ctrl.flush_threshold = c.flush_threshold;
  ctrl.validate();
  return ctrl;
}

SamplingPolicy to_sampling(const RunConfig& c) {
  return SamplingPolicy{.samples_per_decade = c.samples_per_decade, .t_first = c.t_first};
}

VerifySettings to_verify_settings(const RunConfig& c) {
  VerifySettings s;
  s.tolerance = c.tolerance;
  s.velocity_tolerance = c.velocity_tolerance;
  s.slope_tolerance = c.slope_tolerance;
  s.window_decades = c.window_decades;
  s.support_tolerance = c.support_tolerance;
  return s;
}

LinearCoefficient to_coefficient(const RunConfig& c) {
  if (c.coefficient == "constant") return LinearCoefficient::constant(c.coefficient_K);
  return LinearCoefficient::power(c.coefficient_K, c.coefficient_p);
}

}  // namespace kirchhoff
