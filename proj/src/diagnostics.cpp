#include "kirchhoff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double xi : x) m = std::max(m, std::abs(xi));
  return m;
}

std::vector<bool> band_mask(const Spectrum& spectrum, double lambda) {
  std::vector<bool> mask(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) mask[k] = at_least_frequency(spectrum[k], lambda);
  return mask;
}

// Scales the vectors by their common max so that squares of flushed-but-nonzero modes do not
// underflow before the log is taken.
struct Scaled {
  double log_scale_sq = kNegInf;
  std::vector<Vector> x;
};

Scaled scale(std::initializer_list<std::span<const double>> vectors) {
  double s = 0.0;
  for (auto v : vectors) s = std::max(s, max_abs(v));
  Scaled out;
  for (auto v : vectors) {
    Vector scaled(v.begin(), v.end());
    if (s > 0.0) {
      for (double& xi : scaled) xi /= s;
    }
    out.x.push_back(std::move(scaled));
  }
  if (s > 0.0) out.log_scale_sq = 2.0 * std::log(s);
  return out;
}

WeightedValue assemble(double log_weight, const Scaled& sc, double bracket) {
  if (!std::isfinite(sc.log_scale_sq)) return WeightedValue::floor();
  return WeightedValue::from_parts(log_weight + sc.log_scale_sq, bracket);
}

double band_sum(std::span<const double> x, std::span<const double> y, const Spectrum& spectrum,
                double power, const std::vector<bool>& mask) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!mask[k]) continue;
    s += std::pow(spectrum[k] * spectrum[k], power) * x[k] * y[k];
  }
  return s;
}

void require_positive_b(const Sample& s) {
  if (!(s.b > 0.0) && max_abs(s.u) > 0.0) {
    throw DegenerateTrace("b vanishes at t = " + std::to_string(s.t) + " while u is nonzero");
  }
}

// Θ′_k(0) for every mode, zero outside the band.
Vector corrector_slope(const Spectrum& spectrum, double b0, std::span<const double> u0,
                       std::span<const double> u1, double lambda) {
  Vector out(spectrum.size(), 0.0);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (!at_least_frequency(spectrum[k], lambda)) continue;
    out[k] = u1[k] + b0 * spectrum[k] * spectrum[k] * u0[k];
  }
  return out;
}

CorrectorValue corrector_from(const Spectrum& spectrum, double epsilon, double b0,
                              std::span<const double> u0, std::span<const double> u1,
                              double lambda, double t) {
  const Vector slope = corrector_slope(spectrum, b0, u0, u1, lambda);
  const double decay = std::exp(-t / epsilon);
  const double rise = -std::expm1(-t / epsilon);
  CorrectorValue out;
  out.theta.resize(slope.size());
  out.theta_dot.resize(slope.size());
  out.theta_ddot.resize(slope.size());
  for (std::size_t k = 0; k < slope.size(); ++k) {
    out.theta[k] = epsilon * slope[k] * rise;
    out.theta_dot[k] = slope[k] * decay;
    out.theta_ddot[k] = -slope[k] * decay / epsilon;
  }
  return out;
}

// w″ = u″ − Θ″ on the band, from the defect so that the initial layer cancels exactly.
Vector corrected_accel(const Sample& s, const Vector& slope, double epsilon,
                       const std::vector<bool>& mask) {
  const double decay = std::exp(-s.t / epsilon);
  Vector out(s.u.size(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!mask[k]) continue;
    const double w = s.defect.size() == s.u.size() ? s.defect[k] : -epsilon * s.accel[k];
    out[k] = -(w - slope[k] * decay) / epsilon;
  }
  return out;
}

std::vector<bool> full_mask(std::size_t n) { return std::vector<bool>(n, true); }

}  // namespace

WeightedValue WeightedValue::from_parts(double log_weight, double bracket) {
  if (bracket == 0.0 || !std::isfinite(bracket) || !std::isfinite(log_weight)) return floor();
  WeightedValue out;
  out.sign = bracket > 0.0 ? 1 : -1;
  out.below_floor = false;
  out.log_value = log_weight + std::log(std::abs(bracket));
  const double raw = std::exp(out.log_value);
  if (std::isnormal(raw)) out.raw_hint = out.sign * raw;
  return out;
}

double WeightedValue::value() const {
  if (below_floor) return 0.0;
  return sign * std::exp(log_value);
}

double b_of(const Spectrum& spectrum, double gamma, std::span<const double> u) {
  if (u.size() != spectrum.size()) throw DimensionMismatch("state does not match the spectrum");
  const double s = weighted_norm_sq(u, spectrum, 1.0);
  return s > 0.0 ? std::pow(s, gamma) : 0.0;
}

double b_of(const Problem& problem, std::span<const double> u) {
  return b_of(problem.spectrum(), problem.gamma(), u);
}

double lyapunov_energy(const TraceInfo& info, const Sample& s) {
  const double kinetic = info.epsilon * weighted_norm_sq(s.v, info.spectrum, 0.0);
  const double a12 = weighted_norm_sq(s.u, info.spectrum, 1.0);
  if (info.kind == TraceKind::Linear) return kinetic + s.b * a12;
  return kinetic + std::pow(a12, info.gamma + 1.0) / (info.gamma + 1.0);
}

Vector centered_derivative(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (y.size() != n) throw DimensionMismatch("time and value series differ in length");
  Vector d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (t[1] - t[0]);
    return d;
  }
  auto three_point = [&](std::size_t i0, double x) {
    // Derivative at x of the quadratic through (t[i0..i0+2], y[i0..i0+2]).
    const double x0 = t[i0], x1 = t[i0 + 1], x2 = t[i0 + 2];
    return y[i0] * ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2)) +
           y[i0 + 1] * ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2)) +
           y[i0 + 2] * ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
  };
  d[0] = three_point(0, t[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i - 1, t[i]);
  d[n - 1] = three_point(n - 3, t[n - 1]);
  return d;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (y.size() != n) throw DimensionMismatch("slope fit needs equal-length series");
  if (n < 2) throw InsufficientTail("slope fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InsufficientTail("slope fit needs distinct abscissae");
  return sxy / sxx;
}

H2Constants h2_constants(const Trace& trace) {
  if (trace.empty()) throw InvalidInput("h2_constants needs a nonempty trace");
  Vector t = trace.times();
  Vector b(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    b[i] = trace[i].b;
    if (!(b[i] > 0.0)) throw DegenerateTrace("b vanishes at t = " + std::to_string(t[i]));
  }
  const Vector db = centered_derivative(t, b);

  H2Constants out;
  out.K3_hat = std::numeric_limits<double>::infinity();
  Vector upper(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double s = 1.0 + t[i];
    upper[i] = std::max(s * b[i], s * std::abs(db[i]) / b[i]);
    out.K4_hat = std::max(out.K4_hat, upper[i]);
    out.K3_hat = std::min(out.K3_hat, s * b[i]);
  }

  // Template check: the envelope over the last half of the log-time range (t ≥ 1) must not
  // exceed the envelope over the first half by more than 25%.
  std::vector<std::size_t> late;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= 1.0) late.push_back(i);
  }
  if (late.size() >= 4) {
    const double mid = 0.5 * (std::log(t[late.front()]) + std::log(t[late.back()]));
    double first = 0.0, second = 0.0;
    for (std::size_t i : late) {
      double& envelope = std::log(t[i]) < mid ? first : second;
      envelope = std::max(envelope, upper[i]);
    }
    out.satisfies_template = first > 0.0 && second <= 1.25 * first;
  }
  return out;
}

CorrectorValue corrector(const Problem& problem, double lambda, double t) {
  return corrector_from(problem.spectrum(), problem.epsilon(), problem.b0(), problem.u0(),
                        problem.u1(), lambda, t);
}

CorrectorValue corrector(const TraceInfo& info, double lambda, double t) {
  return corrector_from(info.spectrum, info.epsilon, info.b0, info.u0, info.u1, lambda, t);
}

EnergyRecord energies(const Trace& trace, double alpha) {
  const TraceInfo& info = trace.info();
  const double eps = info.epsilon;
  const auto& spec = info.spectrum;
  const auto all = full_mask(spec.size());
  const Vector slope = corrector_slope(spec, info.b0, info.u0, info.u1, spec[0]);

  EnergyRecord rec;
  rec.alpha = alpha;
  for (const Sample& s : trace.samples()) {
    require_positive_b(s);
    rec.times.push_back(s.t);
    const double lw = 2.0 * alpha * s.B;
    const Vector wdd = corrected_accel(s, slope, eps, all);
    const Scaled sc = scale({s.u, s.v, wdd});
    const Vector& u = sc.x[0];
    const Vector& v = sc.x[1];
    const Vector& w = sc.x[2];
    const double uv = band_sum(v, u, spec, 0.0, all);
    const double uu = band_sum(u, u, spec, 0.0, all);
    const double vv = band_sum(v, v, spec, 0.0, all);
    const double a12 = band_sum(u, u, spec, 1.0, all);
    const double ww = band_sum(w, w, spec, 0.0, all);
    if (!(s.b > 0.0)) {
      rec.D.push_back(WeightedValue::floor());
      rec.E.push_back(WeightedValue::floor());
      rec.F.push_back(WeightedValue::floor());
      rec.G.push_back(WeightedValue::floor());
      continue;
    }
    rec.D.push_back(assemble(lw, sc, eps * uv + 0.5 * uu));
    rec.E.push_back(assemble(lw, sc, eps * vv / s.b + a12));
    rec.F.push_back(assemble(lw, sc, vv / (s.b * s.b)));
    rec.G.push_back(assemble(lw, sc, ww / std::pow(s.b, 4)));
  }
  return rec;
}

Theorem1Series theorem1_functionals(const Trace& trace, double lambda, int h) {
  const TraceInfo& info = trace.info();
  if (h != 0 && h != 1) throw InvalidInput("h must be 0 or 1");
  if (!(lambda > 0.0)) throw InvalidBand("band threshold must be positive");
  if (info.kind == TraceKind::Nonlinear && info.nu > 0.0 && !at_least_frequency(lambda, info.nu)) {
    throw InvalidBand("band threshold lies below nu");
  }
  const double eps = info.epsilon;
  const auto& spec = info.spectrum;
  const auto mask = band_mask(spec, lambda);
  const Vector slope = corrector_slope(spec, info.b0, info.u0, info.u1, lambda);
  const double hh = static_cast<double>(h);

  Theorem1Series out;
  out.lambda = lambda;
  out.h = h;
  for (const Sample& s : trace.samples()) {
    require_positive_b(s);
    out.times.push_back(s.t);
    const double lw = 2.0 * lambda * lambda * s.B;
    const Vector wdd = corrected_accel(s, slope, eps, mask);
    const Scaled sc = scale({s.u, s.v, wdd});
    const Vector& u = sc.x[0];
    const Vector& v = sc.x[1];
    const Vector& w = sc.x[2];
    const double b = s.b;
    out.d1.push_back(assemble(lw, sc, eps * band_sum(v, v, spec, hh, mask) / b +
                                          band_sum(u, u, spec, hh + 1.0, mask)));
    out.d2.push_back(assemble(lw, sc, band_sum(v, v, spec, 0.0, mask) / (b * b)));
    out.d3.push_back(assemble(lw, sc, band_sum(w, w, spec, 0.0, mask) / std::pow(b, 4)));
  }
  return out;
}

BetaSeries beta_functionals(const Trace& trace) {
  const TraceInfo& info = trace.info();
  const auto& spec = info.spectrum;
  const double nu = info.nu;
  std::vector<bool> on(spec.size()), off(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    on[k] = same_frequency(spec[k], nu);
    off[k] = !on[k];
  }
  BetaSeries out;
  for (const Sample& s : trace.samples()) {
    require_positive_b(s);
    out.times.push_back(s.t);
    const double lw = 2.0 * nu * nu * s.B;
    const Scaled sc = scale({s.u, s.v});
    const Vector& u = sc.x[0];
    const Vector& v = sc.x[1];
    const double b2 = s.b * s.b;
    out.beta[0].push_back(assemble(lw, sc, band_sum(u, u, spec, 0.0, on)));
    out.beta[1].push_back(assemble(lw, sc, band_sum(u, u, spec, 1.0, off)));
    out.beta[2].push_back(assemble(lw, sc, band_sum(u, u, spec, 2.0, off)));
    out.beta[3].push_back(assemble(lw, sc, band_sum(v, v, spec, 0.0, off) / b2));
    out.beta[4].push_back(assemble(lw, sc, band_sum(v, v, spec, 1.0, off) / b2));
  }
  return out;
}

ComparisonResult comparison_lemma_check(std::span<const double> times, std::span<const double> f,
                                        double K5, double K6, double rel_tol) {
  if (times.size() != f.size()) throw DimensionMismatch("time and value series differ in length");
  ComparisonResult out;
  out.differential_ok = true;
  out.bound_ok = true;
  if (f.empty()) {
    out.holds = true;
    return out;
  }
  out.bound = std::max(f[0], K6 * K6);
  const Vector df = centered_derivative(times, f);
  auto flag = [&](std::size_t i) {
    if (!out.first_violation || i < *out.first_violation) out.first_violation = i;
  };
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > out.bound * (1.0 + rel_tol)) {
      out.bound_ok = false;
      flag(i);
    }
    if (i == 0 || i + 1 == f.size()) continue;
    const double root = std::sqrt(std::max(f[i], 0.0));
    const double rhs = -K5 * root * (root - K6);
    const double slack =
        rel_tol * std::max({std::abs(df[i]), std::abs(rhs), K5 * std::abs(f[i]),
                            std::numeric_limits<double>::min()});
    if (df[i] > rhs + slack) {
      out.differential_ok = false;
      flag(i);
    }
  }
  out.holds = out.differential_ok && out.bound_ok;
  return out;
}

IdentityResiduals derivative_identity_residuals(const Trace& trace, double alpha) {
  const TraceInfo& info = trace.info();
  const std::size_t n = trace.size();
  if (n < 3) throw InsufficientTail("identity residuals need at least three samples");
  const double eps = info.epsilon;
  const auto& spec = info.spectrum;
  const auto all = full_mask(spec.size());
  const Vector slope = corrector_slope(spec, info.b0, info.u0, info.u1, spec[0]);

  Vector t(n), D(n), E(n), F(n), G(n), rD(n), rE(n), rF(n), rG(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = trace[i];
    require_positive_b(s);
    const double b = s.b, db = s.db;
    const double e = std::exp(2.0 * alpha * s.B);
    const Vector wdd = corrected_accel(s, slope, eps, all);
    // w‴ from differentiating εw″ + w′ = −bAu.
    Vector wddd(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double l2 = spec[k] * spec[k];
      wddd[k] = (-wdd[k] - b * l2 * s.v[k] - db * l2 * s.u[k]) / eps;
    }
    const double uv = band_sum(s.v, s.u, spec, 0.0, all);
    const double uu = band_sum(s.u, s.u, spec, 0.0, all);
    const double vv = band_sum(s.v, s.v, spec, 0.0, all);
    const double a12 = band_sum(s.u, s.u, spec, 1.0, all);
    const double v_au = band_sum(s.v, s.u, spec, 1.0, all);
    const double ww = band_sum(wdd, wdd, spec, 0.0, all);
    const double w_w3 = band_sum(wdd, wddd, spec, 0.0, all);

    t[i] = s.t;
    D[i] = e * (eps * uv + 0.5 * uu);
    E[i] = e * (eps * vv / b + a12);
    F[i] = e * vv / (b * b);
    G[i] = e * ww / std::pow(b, 4);
    rD[i] = 2.0 * alpha * b * D[i] - b * e * a12 + eps * e * vv;
    rE[i] = -e * (vv / b) * (2.0 + eps * db / b - 2.0 * alpha * eps * b) +
            2.0 * alpha * b * e * a12;
    rF[i] = -(1.0 / eps) * F[i] * (2.0 + 2.0 * eps * db / b - 2.0 * alpha * eps * b) -
            (2.0 / eps) * e * v_au / b;
    rG[i] = G[i] * (2.0 * alpha * b - 4.0 * db / b) + 2.0 * e * w_w3 / std::pow(b, 4);
  }

  auto residual = [&](const Vector& y, const Vector& rhs) {
    const Vector dy = centered_derivative(t, y);
    double scale = 0.0, worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      scale = std::max(scale, std::abs(rhs[i]));
      worst = std::max(worst, std::abs(dy[i] - rhs[i]));
    }
    return scale > 0.0 ? worst / scale : worst;
  };
  return {residual(D, rD), residual(E, rE), residual(F, rF), residual(G, rG)};
}

}  // namespace kirchhoff
