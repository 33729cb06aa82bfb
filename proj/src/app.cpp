#include "kirchhoff/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "kirchhoff/diagnostics.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/integrator.hpp"

namespace kirchhoff::app {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Raw column: exact zeros after t = 0 and subnormals come from flushing or underflow.
std::string raw_cell(double x, double t) {
  if (std::isinf(x)) return "overflow";
  if ((x == 0.0 && t > 0.0) || (x != 0.0 && !std::isnormal(x))) return "underflow";
  return fmt(x);
}

std::string raw_cell(const WeightedValue& w) {
  if (w.below_floor) return "underflow";
  if (w.raw_hint) return fmt(*w.raw_hint);
  return w.log_value > 0.0 ? "overflow" : "underflow";
}

std::string log_cell(const WeightedValue& w) { return w.below_floor ? "-inf" : fmt(w.log_value); }

json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0.0 ? "inf" : "-inf";
}

json optional_number(const std::optional<double>& x) {
  return x ? number_or_string(*x) : json(nullptr);
}

const char* kind_name(ClaimKind kind) {
  switch (kind) {
    case ClaimKind::Limit: return "limit";
    case ClaimKind::Bound: return "bound";
    case ClaimKind::Check: return "check";
    case ClaimKind::Positive: return "positive";
    case ClaimKind::Info: return "info";
  }
  return "unknown";
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

fs::path prepare_out(const RunConfig& config) {
  fs::path dir(config.out);
  fs::create_directories(dir);
  return dir;
}

void write_trace_file(const fs::path& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_trace_csv(out, trace);
}

bool matches(const std::string& id, const std::string& filter) {
  return id == filter || (id.size() > filter.size() && id.compare(0, filter.size(), filter) == 0 &&
                          id[filter.size()] == ':');
}

std::vector<double> default_lambdas(const Trace& trace) {
  const TraceInfo& info = trace.info();
  std::vector<double> out;
  for (double l : info.spectrum.frequencies()) {
    if (!at_least_frequency(l, info.nu)) continue;
    if (!out.empty() && same_frequency(out.back(), l)) continue;
    out.push_back(l);
  }
  return out;
}

int summarize(const std::vector<VerificationReport>& reports, std::ostream& log) {
  bool ok = true;
  for (const auto& r : reports) {
    const std::size_t fails = r.failures();
    log << r.name << ": " << (fails == 0 ? "PASS" : "FAIL") << " (" << r.claims.size() - fails
        << "/" << r.claims.size() << " claims pass)\n";
    ok = ok && fails == 0;
  }
  return ok ? kExitOk : kExitClaimFailed;
}

json reports_document(const RunConfig& config, const std::vector<VerificationReport>& reports) {
  json doc;
  doc["schema_version"] = kConfigSchemaVersion;
  doc["metadata"] = metadata_json(config);
  doc["reports"] = json::array();
  bool all = true;
  for (const auto& r : reports) {
    doc["reports"].push_back(report_to_json(r));
    all = all && r.all_pass();
  }
  doc["pass"] = all;
  return doc;
}

std::optional<double> measured(const VerificationReport& rep, const std::string& id) {
  for (const auto& c : rep.claims) {
    if (c.id == id && !c.insufficient_tail) return c.measured;
  }
  return std::nullopt;
}

}  // namespace

const std::string& csv_header() {
  static const std::string header =
      "t,b,B,norm_u2,norm_A12u2,norm_Au2,norm_du2,norm_A12du2,norm_ddu2,E_lyap,"
      "beta0,beta1,beta2,beta3,beta4,log_beta0,log_beta1,log_beta2,log_beta3,log_beta4";
  return header;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  const TraceInfo& info = trace.info();
  const auto& spec = info.spectrum;
  const BetaSeries beta = beta_functionals(trace);
  out << csv_header() << '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Sample& s = trace[i];
    const double t = s.t;
    out << fmt(t) << ',' << raw_cell(s.b, t) << ',' << fmt(s.B) << ','
        << raw_cell(weighted_norm_sq(s.u, spec, 0.0), t) << ','
        << raw_cell(weighted_norm_sq(s.u, spec, 1.0), t) << ','
        << raw_cell(weighted_norm_sq(s.u, spec, 2.0), t) << ','
        << raw_cell(weighted_norm_sq(s.v, spec, 0.0), t) << ','
        << raw_cell(weighted_norm_sq(s.v, spec, 1.0), t) << ','
        << raw_cell(weighted_norm_sq(s.accel, spec, 0.0), t) << ','
        << raw_cell(lyapunov_energy(info, s), t);
    for (int k = 0; k < 5; ++k) out << ',' << raw_cell(beta.beta[k][i]);
    for (int k = 0; k < 5; ++k) out << ',' << log_cell(beta.beta[k][i]);
    out << '\n';
  }
}

json report_to_json(const VerificationReport& report) {
  json j;
  j["name"] = report.name;
  j["pass"] = report.all_pass();
  json meta = json::object();
  for (const auto& [k, v] : report.metadata) meta[k] = v;
  j["metadata"] = meta;
  j["claims"] = json::array();
  for (const auto& c : report.claims) {
    json jc;
    jc["id"] = c.id;
    jc["kind"] = kind_name(c.kind);
    jc["predicted"] = optional_number(c.predicted);
    jc["measured"] = number_or_string(c.measured);
    jc["half_window"] = number_or_string(c.half_window);
    jc["spread"] = number_or_string(c.spread);
    jc["slope"] = optional_number(c.slope);
    jc["lower"] = optional_number(c.lower);
    jc["upper"] = optional_number(c.upper);
    jc["two_sided"] = c.two_sided;
    jc["tolerance"] = number_or_string(c.tolerance);
    jc["pass"] = c.pass;
    jc["insufficient_tail"] = c.insufficient_tail;
    jc["note"] = c.note;
    j["claims"].push_back(std::move(jc));
  }
  return j;
}

json metadata_json(const RunConfig& config) {
  json j;
  j["config"] = to_json(config);
  json resolved = json::object();
  try {
    const Spectrum spectrum = resolve_spectrum(config);
    resolved["eigenvalues"] =
        std::vector<double>(spectrum.frequencies().begin(), spectrum.frequencies().end());
    if (!config.u0.empty()) {
      const Problem p = to_problem(config);
      resolved["nu"] = p.nu();
      resolved["b0"] = p.b0();
    }
  } catch (const InvalidInput&) {
    // Metadata is also written for configurations that are only partly meaningful (sweeps).
  }
  j["resolved"] = resolved;
  return j;
}

RunConfig config_from_metadata(const json& metadata) {
  if (!metadata.is_object() || !metadata.contains("config")) {
    throw ConfigError("metadata document has no 'config' block");
  }
  return parse_config(metadata.at("config"));
}

std::vector<VerificationReport> filter_claims(std::vector<VerificationReport> reports,
                                              const std::vector<std::string>& filter) {
  if (filter.empty()) return reports;
  std::vector<VerificationReport> out;
  for (auto& r : reports) {
    std::vector<Claim> kept;
    for (auto& c : r.claims) {
      if (std::any_of(filter.begin(), filter.end(),
                      [&](const std::string& f) { return matches(c.id, f); })) {
        kept.push_back(std::move(c));
      }
    }
    if (kept.empty()) continue;
    r.claims = std::move(kept);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<VerificationReport> verify_all(const Trace& trace, const RunConfig& config) {
  const VerifySettings settings = to_verify_settings(config);
  const std::vector<double> lambdas =
      config.theorem1_lambdas.empty() ? default_lambdas(trace) : config.theorem1_lambdas;
  std::vector<VerificationReport> reports;
  reports.push_back(verify_theorem_A(trace, settings));
  reports.push_back(verify_theorem_1(trace, lambdas, settings));
  reports.push_back(verify_theorem_2(trace, settings));
  reports.push_back(verify_proposition_3(trace, settings));
  return reports;
}

std::vector<SweepRow> run_sweep_rows(const RunConfig& config) {
  if (config.sweep_epsilon.empty() && config.sweep_gamma.empty()) {
    throw ConfigError("sweep needs a nonempty sweep_epsilon or sweep_gamma list");
  }
  const std::vector<double> eps =
      config.sweep_epsilon.empty() ? std::vector<double>{config.epsilon} : config.sweep_epsilon;
  const std::vector<double> gam =
      config.sweep_gamma.empty() ? std::vector<double>{config.gamma} : config.sweep_gamma;
  std::vector<SweepRow> rows;
  for (double g : gam) {
    for (double e : eps) {
      SweepRow row;
      row.epsilon = e;
      row.gamma = g;
      rows.push_back(std::move(row));
    }
  }

  auto compute = [&](SweepRow& row) {
    try {
      RunConfig c = config;
      c.epsilon = row.epsilon;
      c.gamma = row.gamma;
      const Trace trace = evolve(to_problem(c), c.t_end, to_controller(c), to_sampling(c));
      const VerificationReport rep = verify_theorem_2(trace, to_verify_settings(c));
      row.b_limit = measured(rep, "B2");
      row.a12u_limit = measured(rep, "B32b:A12u");
      row.au_limit = measured(rep, "B32b:Au");
      row.u_nu_limit = measured(rep, "B31b");
      row.du_limit = measured(rep, "B4b:du");
      row.a12du_limit = measured(rep, "B4b:A12du");
      row.pass = rep.all_pass();
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = e.what();
      row.pass = false;
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(config.threads, 1)), rows.size());
  if (workers <= 1) {
    for (auto& row : rows) compute(row);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) compute(rows[i]);
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

int run_simulate(const RunConfig& config, std::ostream& log) {
  const Trace trace =
      evolve(to_problem(config), config.t_end, to_controller(config), to_sampling(config));
  const fs::path dir = prepare_out(config);
  write_trace_file(dir / "trace.csv", trace);
  write_json(dir / "metadata.json", metadata_json(config));
  log << "simulate: " << trace.size() << " samples written to " << (dir / "trace.csv").string()
      << '\n';
  return kExitOk;
}

int run_verify(const RunConfig& config, std::ostream& log) {
  const Trace trace =
      evolve(to_problem(config), config.t_end, to_controller(config), to_sampling(config));
  const fs::path dir = prepare_out(config);
  write_trace_file(dir / "trace.csv", trace);
  write_json(dir / "metadata.json", metadata_json(config));
  const auto reports = filter_claims(verify_all(trace, config), config.claims);
  write_json(dir / "report.json", reports_document(config, reports));
  return summarize(reports, log);
}

int run_linear(const RunConfig& config, std::ostream& log) {
  const Spectrum spectrum = resolve_spectrum(config);
  if (config.u0.size() != spectrum.size()) {
    throw DimensionMismatch("u0 length must match the number of eigenvalues");
  }
  if (!config.eigenvalues.empty() &&
      !std::is_sorted(config.eigenvalues.begin(), config.eigenvalues.end())) {
    throw ConfigError("linear runs need eigenvalues in nondecreasing order");
  }
  const Vector u1 = config.u1.empty() ? Vector(config.u0.size(), 0.0) : config.u1;
  const LinearCoefficient coeff = to_coefficient(config);
  const Trace trace = evolve_linear(spectrum, coeff, config.epsilon, config.u0, u1, config.t_end,
                                    to_controller(config), to_sampling(config));
  const fs::path dir = prepare_out(config);
  write_trace_file(dir / "trace.csv", trace);
  write_json(dir / "metadata.json", metadata_json(config));
  const double sigma = config.sigma_M.value_or(spectrum[0]);
  VerificationReport rep = verify_propositions(trace, sigma, to_verify_settings(config));
  rep.metadata.emplace_back("h2b", coeff.satisfies_h2b() ? "true" : "false");
  const auto reports = filter_claims({std::move(rep)}, config.claims);
  write_json(dir / "report.json", reports_document(config, reports));
  return summarize(reports, log);
}

int run_sweep(const RunConfig& config, std::ostream& log) {
  const auto rows = run_sweep_rows(config);
  const fs::path dir = prepare_out(config);
  std::ofstream out(dir / "sweep.csv");
  if (!out) throw Error("cannot write sweep.csv");
  auto cell = [](const std::optional<double>& x) { return x ? fmt(*x) : std::string("nan"); };
  out << "epsilon,gamma,status,pass,b_limit,a12u_limit,au_limit,u_nu_limit,du_limit,a12du_limit\n";
  bool ok = true;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    out << fmt(r.epsilon) << ',' << fmt(r.gamma) << ',' << '"' << status << '"' << ','
        << (r.pass ? 1 : 0) << ',' << cell(r.b_limit) << ',' << cell(r.a12u_limit) << ','
        << cell(r.au_limit) << ',' << cell(r.u_nu_limit) << ',' << cell(r.du_limit) << ','
        << cell(r.a12du_limit) << '\n';
    log << "epsilon=" << fmt_short(r.epsilon) << " gamma=" << fmt_short(r.gamma)
        << " (1+t)b -> " << (r.b_limit ? fmt_short(*r.b_limit) : "nan")
        << (r.pass ? "  PASS" : "  FAIL");
    if (r.status != "ok") log << "  " << r.status;
    log << '\n';
    ok = ok && r.pass;
    if (r.b_limit) {
      lo = std::min(lo, *r.b_limit);
      hi = std::max(hi, *r.b_limit);
    }
  }
  write_json(dir / "metadata.json", metadata_json(config));
  if (hi >= lo && config.sweep_gamma.empty()) {
    log << "sweep: relative spread of (1+t)b limits across epsilon = " << fmt_short((hi - lo) / hi)
        << '\n';
  }
  return ok ? kExitOk : kExitClaimFailed;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Spectral simulator and verification harness for the dissipative Kirchhoff equation"};
  cli.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<double> t_end, epsilon, gamma;
  std::optional<std::string> claims;
  std::optional<int> threads;
  std::optional<long long> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--t-end", t_end, "Final time");
    sub->add_option("--epsilon", epsilon, "Mass parameter epsilon");
    sub->add_option("--gamma", gamma, "Nonlinearity exponent gamma");
    sub->add_option("--claims", claims, "Comma-separated claim-id filter");
    sub->add_option("--threads", threads, "Worker threads for sweeps");
    sub->add_option("--seed", seed, "Reserved; the dynamics are deterministic");
  };
  CLI::App* simulate = cli.add_subcommand("simulate", "Integrate and write the trace CSV");
  CLI::App* verify = cli.add_subcommand("verify", "Integrate and verify the theorems");
  CLI::App* linear = cli.add_subcommand("linear", "Linear problem with a prescribed coefficient");
  CLI::App* sweep = cli.add_subcommand("sweep", "Limit constants over an epsilon or gamma list");
  for (CLI::App* sub : {simulate, verify, linear, sweep}) add_common(sub);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig config = load_config(config_path);
    if (out_dir) config.out = *out_dir;
    if (t_end) config.t_end = *t_end;
    if (epsilon) config.epsilon = *epsilon;
    if (gamma) config.gamma = *gamma;
    if (threads) config.threads = *threads;
    if (claims) {
      config.claims.clear();
      std::string item;
      for (char ch : *claims + ",") {
        if (ch == ',') {
          if (!item.empty()) config.claims.push_back(item);
          item.clear();
        } else if (ch != ' ') {
          item += ch;
        }
      }
    }
    // Overrides go through the same validation as the file.
    config = parse_config(to_json(config));

    if (simulate->parsed()) return run_simulate(config, out);
    if (verify->parsed()) return run_verify(config, out);
    if (linear->parsed()) return run_linear(config, out);
    return run_sweep(config, out);
  } catch (const InvalidInput& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace kirchhoff::app
