#include "kirchhoff/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "kirchhoff/diagnostics.hpp"
#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

constexpr std::size_t kMinTailSamples = 8;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_list(std::span<const double> xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt(xs[i]);
  }
  return out + "]";
}

// Indices of samples inside [t_end·10^{−decades}, t_end] with t ≥ 1.
std::vector<std::size_t> window(std::span<const double> t, double decades) {
  std::vector<std::size_t> idx;
  if (t.empty()) return idx;
  const double start = std::max(1.0, t.back() * std::pow(10.0, -decades));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= start * (1.0 - 1e-12)) idx.push_back(i);
  }
  return idx;
}

// Mean of y over the window, uniform in ln t (trapezoid rule).
double log_time_mean(std::span<const double> t, std::span<const double> y,
                     const std::vector<std::size_t>& idx) {
  if (idx.size() == 1) return y[idx[0]];
  double area = 0.0;
  for (std::size_t j = 1; j < idx.size(); ++j) {
    const double dx = std::log(t[idx[j]]) - std::log(t[idx[j - 1]]);
    area += 0.5 * dx * (y[idx[j]] + y[idx[j - 1]]);
  }
  const double span = std::log(t[idx.back()]) - std::log(t[idx.front()]);
  return span > 0.0 ? area / span : y[idx.back()];
}

void base_metadata(VerificationReport& rep, const Trace& trace) {
  const TraceInfo& info = trace.info();
  rep.metadata.emplace_back("kind", info.kind == TraceKind::Nonlinear ? "nonlinear" : "linear");
  rep.metadata.emplace_back("eigenvalues", fmt_list(info.spectrum.frequencies()));
  rep.metadata.emplace_back("epsilon", fmt(info.epsilon));
  if (info.kind == TraceKind::Nonlinear) rep.metadata.emplace_back("gamma", fmt(info.gamma));
  rep.metadata.emplace_back("nu", fmt(info.nu));
  rep.metadata.emplace_back("b0", fmt(info.b0));
  rep.metadata.emplace_back("t_end", trace.empty() ? "0" : fmt(trace.back().t));
  rep.metadata.emplace_back("samples", std::to_string(trace.size()));
}

void require_nonlinear(const Trace& trace) {
  if (trace.info().kind != TraceKind::Nonlinear) {
    throw InvalidInput("this verifier needs a nonlinear trace");
  }
}

Claim insufficient(Claim c, const std::string& what) {
  c.insufficient_tail = true;
  c.pass = false;
  c.note = "InsufficientTail: " + what;
  return c;
}

Claim limit_claim(std::string id, std::span<const double> t, std::span<const double> y,
                  std::optional<double> predicted, double tol, double decades) {
  Claim c;
  c.id = std::move(id);
  c.kind = ClaimKind::Limit;
  c.predicted = predicted;
  c.tolerance = tol;
  try {
    const LimitEstimate est = estimate_limit(t, y, decades);
    c.measured = est.value;
    c.half_window = est.half_window_value;
    c.spread = est.spread;
  } catch (const InsufficientTail& e) {
    return insufficient(std::move(c), e.what());
  }
  c.pass = claim_passes(c);
  return c;
}

// log_y holds natural logs; −inf marks below-floor samples.
Claim bound_claim(std::string id, std::span<const double> t, std::span<const double> log_y,
                  double tol, double decades, bool two_sided) {
  Claim c;
  c.id = std::move(id);
  c.kind = ClaimKind::Bound;
  c.tolerance = tol;
  c.two_sided = two_sided;
  const auto idx = window(t, decades);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i : idx) {
    if (!std::isfinite(log_y[i])) continue;
    lo = std::min(lo, log_y[i]);
    hi = std::max(hi, log_y[i]);
  }
  if (!std::isfinite(hi)) {
    // Every tail sample is below floor or the tail is empty.
    if (idx.size() < kMinTailSamples) return insufficient(std::move(c), "tail window too short");
    c.measured = hi;
    c.slope = 0.0;
    c.note = "vacuous: below floor on the whole tail";
    c.pass = !two_sided;
    if (two_sided) c.note += " (two-sided bound needs a positive lower witness)";
    return c;
  }
  c.measured = hi;
  const double lower = std::exp(lo), upper = std::exp(hi);
  if (std::isfinite(lower)) c.lower = lower;
  if (std::isfinite(upper)) c.upper = upper;
  try {
    c.slope = tail_slope(t, log_y, decades);
  } catch (const InsufficientTail& e) {
    return insufficient(std::move(c), e.what());
  }
  c.pass = claim_passes(c);
  return c;
}

Vector log_of(const std::vector<WeightedValue>& xs) {
  Vector out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.below_floor ? -std::numeric_limits<double>::infinity()
                                                       : x.log_value);
  return out;
}

double log_or_floor(double x) {
  return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

std::vector<bool> nu_band(const TraceInfo& info) {
  std::vector<bool> on(info.spectrum.size());
  for (std::size_t k = 0; k < on.size(); ++k) on[k] = same_frequency(info.spectrum[k], info.nu);
  return on;
}

}  // namespace

LimitEstimate estimate_limit(std::span<const double> t, std::span<const double> value,
                             double window_decades) {
  if (t.size() != value.size()) throw DimensionMismatch("time and value series differ in length");
  if (!(window_decades > 0.0)) throw InvalidInput("window must span a positive number of decades");
  const auto full = window(t, window_decades);
  if (full.size() < kMinTailSamples) {
    throw InsufficientTail("need at least 8 samples with t >= 1 in the trailing window, have " +
                           std::to_string(full.size()));
  }
  const auto half = window(t, 0.5 * window_decades);
  LimitEstimate est;
  est.samples = full.size();
  est.value = log_time_mean(t, value, full);
  est.half_window_value = log_time_mean(t, value, half.empty() ? full : half);
  est.spread = std::abs(est.value - est.half_window_value);
  return est;
}

double tail_slope(std::span<const double> t, std::span<const double> log_value,
                  double window_decades) {
  if (t.size() != log_value.size()) {
    throw DimensionMismatch("time and value series differ in length");
  }
  Vector x, y;
  for (std::size_t i : window(t, window_decades)) {
    if (!std::isfinite(log_value[i])) continue;
    x.push_back(std::log(t[i]));
    y.push_back(log_value[i]);
  }
  if (x.size() < kMinTailSamples) {
    throw InsufficientTail("need at least 8 finite samples with t >= 1 in the trailing window");
  }
  return least_squares_slope(x, y);
}

bool claim_passes(const Claim& c) {
  if (c.insufficient_tail) return false;
  switch (c.kind) {
    case ClaimKind::Limit: {
      if (!std::isfinite(c.measured)) return false;
      if (!c.predicted) return c.spread <= 0.5 * c.tolerance * std::abs(c.measured);
      const double scale = std::abs(*c.predicted);
      return std::abs(c.measured - *c.predicted) <= c.tolerance * scale &&
             c.spread <= 0.5 * c.tolerance * scale;
    }
    case ClaimKind::Bound: {
      if (!c.slope) return false;
      if (std::isinf(c.measured) && c.measured < 0.0) return !c.two_sided;
      if (!std::isfinite(c.measured)) return false;
      if (c.two_sided) return std::abs(*c.slope) <= c.tolerance;
      return *c.slope <= c.tolerance;
    }
    case ClaimKind::Check:
      return std::isfinite(c.measured) && c.measured <= c.tolerance;
    case ClaimKind::Positive:
      return c.measured > 0.0;
    case ClaimKind::Info:
      return true;
  }
  return false;
}

bool VerificationReport::all_pass() const { return failures() == 0; }

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(claims.begin(), claims.end(), [](const Claim& c) { return !c.pass; }));
}

double VerifySettings::limit_tolerance(double gamma) const {
  if (tolerance) return *tolerance;
  return gamma < 0.5 ? 0.05 : 0.02;
}

LimitPredictions predict_limits(double gamma, double nu) {
  const double nu2 = nu * nu;
  const double base = 2.0 * nu2 * gamma;
  LimitPredictions p;
  p.b = 1.0 / base;
  p.a12u = 1.0 / std::pow(base, 1.0 / gamma);
  p.u_nu = p.a12u / nu2;
  p.au = nu2 * p.a12u;
  p.du = nu2 / std::pow(base, 2.0 + 1.0 / gamma);
  p.a12du = nu2 * nu2 / std::pow(base, 2.0 + 1.0 / gamma);
  return p;
}

VerificationReport verify_theorem_A(const Trace& trace, const VerifySettings& settings) {
  require_nonlinear(trace);
  const TraceInfo& info = trace.info();
  const auto& spec = info.spectrum;
  const double g = info.gamma;
  const Vector t = trace.times();
  Vector h1(t.size()), h11(t.size()), h12(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Sample& s = trace[i];
    const double lt = std::log1p(t[i]);
    h1[i] = lt / g + log_or_floor(weighted_norm_sq(s.u, spec, 1.0));
    h11[i] = lt / g + log_or_floor(weighted_norm_sq(s.u, spec, 2.0));
    h12[i] = (2.0 + 1.0 / g) * lt + log_or_floor(weighted_norm_sq(s.v, spec, 0.0));
  }
  VerificationReport rep;
  rep.name = "theorem_A";
  base_metadata(rep, trace);
  const double tol = settings.slope_tolerance, w = settings.window_decades;
  rep.claims.push_back(bound_claim("h1", t, h1, tol, w, true));
  rep.claims.push_back(bound_claim("h11", t, h11, tol, w, true));
  rep.claims.push_back(bound_claim("h12", t, h12, tol, w, false));
  return rep;
}

VerificationReport verify_theorem_1(const Trace& trace, std::span<const double> lambdas,
                                    const VerifySettings& settings) {
  require_nonlinear(trace);
  VerificationReport rep;
  rep.name = "theorem_1";
  base_metadata(rep, trace);
  rep.metadata.emplace_back("lambdas", fmt_list(lambdas));
  const Vector t = trace.times();
  const double tol = settings.slope_tolerance, w = settings.window_decades;
  for (double lambda : lambdas) {
    const std::string tag = "lambda=" + fmt(lambda);
    for (int h : {0, 1}) {
      const Theorem1Series s = theorem1_functionals(trace, lambda, h);
      rep.claims.push_back(
          bound_claim("D1:h=" + std::to_string(h) + ":" + tag, t, log_of(s.d1), tol, w, false));
      if (h == 0) {
        rep.claims.push_back(bound_claim("D2:" + tag, t, log_of(s.d2), tol, w, false));
        rep.claims.push_back(bound_claim("D3:" + tag, t, log_of(s.d3), tol, w, false));
      }
    }
  }
  return rep;
}

VerificationReport verify_theorem_2(const Trace& trace, const VerifySettings& settings) {
  require_nonlinear(trace);
  const TraceInfo& info = trace.info();
  const auto& spec = info.spectrum;
  const double g = info.gamma, nu = info.nu, nu2 = nu * nu;
  const LimitPredictions pred = predict_limits(g, nu);
  const double tol = settings.limit_tolerance(g);
  const double vtol = std::max(tol, settings.velocity_tolerance);
  const double w = settings.window_decades;
  const auto on = nu_band(info);
  const std::size_t n = trace.size();

  const Vector t = trace.times();
  Vector b1(n), b2(n), b31(n), a12u(n), au(n), du(n), a12du(n), b5(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = trace[i];
    const double tp = 1.0 + t[i];
    const double pu = std::pow(tp, 1.0 / g);
    const double pv = std::pow(tp, 2.0 + 1.0 / g);
    double unu = 0.0;
    for (std::size_t k = 0; k < s.u.size(); ++k) {
      if (on[k]) unu += s.u[k] * s.u[k];
    }
    b1[i] = std::log(tp) - 2.0 * nu2 * g * s.B;
    b2[i] = tp * s.b;
    b31[i] = pu * unu;
    a12u[i] = pu * weighted_norm_sq(s.u, spec, 1.0);
    au[i] = pu * weighted_norm_sq(s.u, spec, 2.0);
    du[i] = pv * weighted_norm_sq(s.v, spec, 0.0);
    a12du[i] = pv * weighted_norm_sq(s.v, spec, 1.0);
    b5[i] = (4.0 + 1.0 / g) * std::log(tp) + log_or_floor(weighted_norm_sq(s.accel, spec, 0.0));
  }

  VerificationReport rep;
  rep.name = "theorem_2";
  base_metadata(rep, trace);
  rep.claims.push_back(bound_claim("B1", t, b1, settings.slope_tolerance, w, true));
  rep.claims.push_back(limit_claim("B2", t, b2, pred.b, tol, w));
  rep.claims.push_back(limit_claim("B31b", t, b31, pred.u_nu, tol, w));
  rep.claims.push_back(limit_claim("B32b:A12u", t, a12u, pred.a12u, tol, w));
  rep.claims.push_back(limit_claim("B32b:Au", t, au, pred.au, tol, w));
  rep.claims.push_back(limit_claim("B4b:du", t, du, pred.du, vtol, w));
  rep.claims.push_back(limit_claim("B4b:A12du", t, a12du, pred.a12du, vtol, w));
  rep.claims.push_back(bound_claim("B5", t, b5, settings.slope_tolerance, w, true));

  // Renormalized limit pair, componentwise on the ν-band.
  Claim support;
  support.id = "LIM:support";
  support.kind = ClaimKind::Check;
  support.tolerance = settings.support_tolerance;
  Claim pair;
  pair.id = "LIM:pair";
  pair.kind = ClaimKind::Check;
  pair.tolerance = tol;
  Claim norm;
  norm.id = "LIM:norm";
  norm.kind = ClaimKind::Limit;
  norm.predicted = pred.u_nu;
  norm.tolerance = tol;
  try {
    Vector uk(n), vk(n);
    Vector u_inf(spec.size(), 0.0), v_inf(spec.size(), 0.0), u_half(spec.size(), 0.0);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      if (!on[k]) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const double tp = 1.0 + t[i];
        uk[i] = std::pow(tp, 0.5 / g) * trace[i].u[k];
        vk[i] = std::pow(tp, 1.0 + 0.5 / g) * trace[i].v[k];
      }
      const LimitEstimate eu = estimate_limit(t, uk, w);
      const LimitEstimate ev = estimate_limit(t, vk, w);
      u_inf[k] = eu.value;
      u_half[k] = eu.half_window_value;
      v_inf[k] = ev.value;
    }
    double mass = 0.0, mass_half = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      mass += u_inf[k] * u_inf[k];
      mass_half += u_half[k] * u_half[k];
    }
    norm.measured = mass;
    norm.half_window = mass_half;
    norm.spread = std::abs(mass - mass_half);
    norm.pass = claim_passes(norm);

    const Sample& last = trace.back();
    double off = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      if (!on[k]) off += last.u[k] * last.u[k];
    }
    off *= std::pow(1.0 + last.t, 1.0 / g);
    support.measured = mass > 0.0 ? off / mass : std::numeric_limits<double>::infinity();
    support.pass = claim_passes(support);

    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < spec.size(); ++k) {
      if (!on[k] || !(std::abs(u_inf[k]) >= 1e-6 * std::sqrt(mass)) || mass == 0.0) continue;
      const double target = -u_inf[k] / (2.0 * g);
      worst = std::max(worst, std::abs(v_inf[k] - target) / std::abs(target));
    }
    if (std::isfinite(worst)) {
      pair.measured = worst;
    } else {
      pair.measured = std::numeric_limits<double>::infinity();
      pair.note = "no nonzero component of the limit on the nu-band";
    }
    pair.pass = claim_passes(pair);
  } catch (const InsufficientTail& e) {
    norm = insufficient(std::move(norm), e.what());
    support = insufficient(std::move(support), e.what());
    pair = insufficient(std::move(pair), e.what());
  }
  rep.claims.push_back(std::move(support));
  rep.claims.push_back(std::move(pair));
  rep.claims.push_back(std::move(norm));
  return rep;
}

VerificationReport verify_proposition_3(const Trace& trace, const VerifySettings& settings) {
  require_nonlinear(trace);
  const BetaSeries beta = beta_functionals(trace);
  const Vector& t = beta.times;
  const double w = settings.window_decades;

  VerificationReport rep;
  rep.name = "proposition_3";
  base_metadata(rep, trace);

  Claim stiun;
  stiun.id = "stiun";
  stiun.kind = ClaimKind::Positive;
  stiun.measured = std::numeric_limits<double>::infinity();
  for (const auto& b0 : beta.beta[0]) stiun.measured = std::min(stiun.measured, b0.value());
  stiun.pass = claim_passes(stiun);
  rep.claims.push_back(std::move(stiun));

  Vector b0(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) b0[i] = beta.beta[0][i].value();
  rep.claims.push_back(limit_claim("lim1", t, b0, std::nullopt,
                                   settings.limit_tolerance(trace.info().gamma), w));

  for (int i = 1; i <= 4; ++i) {
    Claim c;
    c.id = "lim2:beta" + std::to_string(i);
    c.kind = ClaimKind::Info;
    const Vector lg = log_of(beta.beta[i]);
    c.measured = lg.empty() ? 0.0 : lg.back();
    try {
      c.slope = tail_slope(t, lg, w);
    } catch (const InsufficientTail& e) {
      c.note = e.what();
    }
    c.pass = true;
    rep.claims.push_back(std::move(c));
  }
  return rep;
}

VerificationReport verify_propositions(const Trace& linear_trace, double sigma_M,
                                       const VerifySettings& settings) {
  const TraceInfo& info = linear_trace.info();
  if (info.kind != TraceKind::Linear) throw InvalidInput("propositions need a linear trace");
  if (!(sigma_M > 0.0) || !at_least_frequency(info.spectrum[0], sigma_M)) {
    throw InvalidBand("sigma_M must be positive and not exceed the smallest frequency");
  }
  const Vector t = linear_trace.times();
  const double tol = settings.slope_tolerance, w = settings.window_decades;
  // With sigma_M at most the smallest frequency the band is every mode, so the band
  // functionals are exactly the weighted energies of the linear problem.
  const Theorem1Series s1 = theorem1_functionals(linear_trace, sigma_M, 1);
  const Theorem1Series s0 = theorem1_functionals(linear_trace, sigma_M, 0);

  VerificationReport rep;
  rep.name = "propositions";
  base_metadata(rep, linear_trace);
  rep.metadata.emplace_back("sigma_M", fmt(sigma_M));
  if (info.coefficient) {
    rep.metadata.emplace_back("coefficient_K", fmt(info.coefficient->K()));
    rep.metadata.emplace_back("coefficient_p", fmt(info.coefficient->p()));
  }
  rep.claims.push_back(bound_claim("SL1b", t, log_of(s1.d1), tol, w, false));
  rep.claims.push_back(bound_claim("SL2b", t, log_of(s0.d2), tol, w, false));
  rep.claims.push_back(bound_claim("SL3b", t, log_of(s0.d3), tol, w, false));
  return rep;
}

}  // namespace kirchhoff
