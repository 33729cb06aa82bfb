#include "kirchhoff/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

struct Coeff {
  double b = 0.0;
  double db = 0.0;
};

using CoeffFn = std::function<Coeff(double t, const Vector& u, const Vector& w)>;

constexpr double kBlowupFactor = 10.0;
constexpr long kMaxSteps = 200'000'000;

// Exact flow over tau of the frozen mode system
//   u′ = −q u + w,   w′ = (q′ − q²) u + (q − 1/ε) w,
// which is εu″ + u′ + qu = 0 rewritten with w = u′ + qu. Its characteristic polynomial is
// εr² + r + (q − εq′) = 0.
void propagate(double& u, double& w, double tau, double q, double dq, double eps) {
  if (u == 0.0 && w == 0.0) return;
  const double p = 0.5 / eps;
  const double q_eff = q - eps * dq;
  const double disc = 1.0 - 4.0 * eps * q_eff;
  const double m21 = dq - q * q;
  double u1 = 0.0;
  double w1 = 0.0;
  if (disc > 0.0) {
    const double delta = p * std::sqrt(disc);
    const double s = delta + p;
    const double slow = -q_eff / (eps * s);  // δ − p without cancellation
    const double fast = -s;
    if (2.0 * delta * tau >= 0.5) {
      // Spectral projectors; c = slow + q computed without cancellation.
      const double c = (dq + q * slow) / s;
      const double es = std::exp(slow * tau);
      const double ef = std::exp(fast * tau);
      const double inv = 1.0 / (2.0 * delta);
      u1 = (es * ((s - q) * u + w) - ef * (w - c * u)) * inv;
      w1 = (es * (m21 * u + c * w) - ef * (m21 * u + (q - s) * w)) * inv;
    } else {
      const double es = std::exp(slow * tau);
      const double gc = 0.5 * (es + std::exp(fast * tau));
      const double gs = delta > 0.0 ? es * (-std::expm1(-2.0 * delta * tau)) / (2.0 * delta)
                                    : tau * std::exp(-p * tau);
      u1 = gc * u + gs * ((p - q) * u + w);
      w1 = gc * w + gs * (m21 * u + (q - p) * w);
    }
  } else {
    const double damp = std::exp(-p * tau);
    double gc = damp;
    double gs = tau * damp;
    if (disc < 0.0) {
      const double omega = p * std::sqrt(-disc);
      gc = damp * std::cos(omega * tau);
      gs = damp * std::sin(omega * tau) / omega;
    }
    u1 = gc * u + gs * ((p - q) * u + w);
    w1 = gc * w + gs * (m21 * u + (q - p) * w);
  }
  u = u1;
  w = w1;
}

CoeffFn nonlinear_coefficient(const Spectrum& spectrum, double gamma) {
  return [&spectrum, gamma](double, const Vector& u, const Vector& w) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += spectrum[k] * spectrum[k] * u[k] * u[k];
    if (s == 0.0) return Coeff{};
    const double b = std::pow(s, gamma);
    double m = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double l2 = spectrum[k] * spectrum[k];
      m += l2 * u[k] * (w[k] - l2 * b * u[k]);
    }
    return Coeff{b, 2.0 * gamma * b * m / s};
  };
}

CoeffFn prescribed_coefficient(const LinearCoefficient& coeff) {
  return [coeff](double t, const Vector&, const Vector&) {
    return Coeff{coeff.value(t), coeff.derivative(t)};
  };
}

struct StepOutcome {
  SystemState state;
  double dt = 0.0;
  double next_dt = 0.0;
  int rejections = 0;
};

class Stepper {
 public:
  Stepper(const Spectrum& spectrum, double epsilon, CoeffFn coeff,
          std::optional<LinearCoefficient> closed_form)
      : spectrum_(spectrum),
        eps_(epsilon),
        coeff_(std::move(coeff)),
        closed_form_(std::move(closed_form)) {}

  Coeff coefficient(const SystemState& s) const { return coeff_(s.t, s.u, s.defect); }

  StepOutcome advance(const SystemState& s, const StepController& ctrl, double dt_try,
                      std::optional<double> land_at) const {
    const Coeff c0 = coeff_(s.t, s.u, s.defect);
    double dt = std::min(dt_try, ctrl.dt_max_factor * (1.0 + s.t));
    int rejections = 0;
    for (;;) {
      if (dt < ctrl.dt_min && !(land_at && rejections == 0)) {
        throw StepUnderflow("step size " + std::to_string(dt) + " below dt_min at t=" +
                            std::to_string(s.t));
      }
      Trial trial = attempt(s, c0, dt);
      if (trial.change <= ctrl.eta_b) {
        const double t1 =
            (land_at && rejections == 0 && dt == dt_try) ? *land_at : s.t + dt;
        StepOutcome out;
        out.dt = dt;
        out.rejections = rejections;
        const double grow = trial.change > 0.0 ? 0.9 * ctrl.eta_b / trial.change : 2.0;
        out.next_dt = dt * std::min(2.0, grow);
        out.state = finish(s, std::move(trial), t1, c0, ctrl);
        return out;
      }
      ++rejections;
      const double shrink =
          std::isfinite(trial.change) ? std::clamp(0.9 * ctrl.eta_b / trial.change, 0.1, 0.5) : 0.1;
      dt *= shrink;
    }
  }

 private:
  struct Trial {
    Vector u;
    Vector w;
    Coeff c1;
    double change = 0.0;
  };

  Trial attempt(const SystemState& s, Coeff c0, double dt) const {
    const std::size_t n = s.u.size();
    Vector uh = s.u, wh = s.defect;
    for (std::size_t k = 0; k < n; ++k) {
      const double l2 = spectrum_[k] * spectrum_[k];
      propagate(uh[k], wh[k], 0.5 * dt, l2 * c0.b, l2 * c0.db, eps_);
    }
    const Coeff ch = coeff_(s.t + 0.5 * dt, uh, wh);
    Trial trial{s.u, s.defect, {}, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      const double l2 = spectrum_[k] * spectrum_[k];
      propagate(trial.u[k], trial.w[k], dt, l2 * ch.b, l2 * ch.db, eps_);
    }
    trial.c1 = coeff_(s.t + dt, trial.u, trial.w);
    if (c0.b > 0.0) {
      // Relative change of b, plus the curvature scale dt·sqrt(|b″|/b) so that dt stays
      // proportional to eta_b near extrema of b where the change is quadratic in dt.
      const double jump = std::max(2.0 * std::abs(ch.b - c0.b), std::abs(trial.c1.b - c0.b));
      const double curvature = std::sqrt(dt * std::abs(trial.c1.db - c0.db) / c0.b);
      trial.change = std::max(jump / c0.b, curvature);
    }
    if (!std::isfinite(trial.c1.b) || !std::isfinite(ch.b)) {
      trial.change = std::numeric_limits<double>::infinity();
    }
    return trial;
  }

  SystemState finish(const SystemState& s, Trial trial, double t1, Coeff c0,
                     const StepController& ctrl) const {
    SystemState out;
    out.t = t1;
    out.u = std::move(trial.u);
    out.defect = std::move(trial.w);
    out.v.assign(out.u.size(), 0.0);
    const double b1 = trial.c1.b;
    for (std::size_t k = 0; k < out.u.size(); ++k) {
      out.v[k] = out.defect[k] - spectrum_[k] * spectrum_[k] * b1 * out.u[k];
      if (std::abs(out.u[k]) < ctrl.flush_threshold && std::abs(out.v[k]) < ctrl.flush_threshold) {
        out.u[k] = 0.0;
        out.v[k] = 0.0;
        out.defect[k] = 0.0;
      }
    }
    if (closed_form_) {
      out.B = closed_form_->integral(t1);
    } else {
      out.B = s.B + 0.5 * (t1 - s.t) * (c0.b + b1);
    }
    return out;
  }

  const Spectrum& spectrum_;
  double eps_;
  CoeffFn coeff_;
  std::optional<LinearCoefficient> closed_form_;
};

Sample make_sample(const SystemState& s, const Coeff& c, double eps) {
  Sample out;
  out.t = s.t;
  out.u = s.u;
  out.v = s.v;
  out.defect = s.defect;
  out.accel.resize(s.defect.size());
  for (std::size_t k = 0; k < s.defect.size(); ++k) out.accel[k] = -s.defect[k] / eps;
  out.b = c.b;
  out.db = c.db;
  out.B = s.B;
  return out;
}

double frequency_of_first_active(const Spectrum& spectrum, const Vector& a, const Vector& b) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != 0.0 || b[k] != 0.0) return spectrum[k];
  }
  return 0.0;
}

Trace run(const Stepper& stepper, const Spectrum& spectrum, SystemState state, TraceInfo info,
          double t_end, const StepController& ctrl, const SamplingPolicy& sampling,
          bool check_blowup) {
  ctrl.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidInput("t_end must be > 0");
  const double eps = info.epsilon;
  Trace trace(std::move(info));
  trace.push(make_sample(state, stepper.coefficient(state), eps));
  const double energy0 = weighted_norm_sq(state.u, spectrum, 1.0);

  double dt_prop = 1e-3 * std::min(eps, 1.0);
  long steps = 0;
  for (double target : sample_times(t_end, sampling)) {
    while (state.t < target) {
      const double gap = target - state.t;
      const bool clamp = dt_prop >= gap;
      const double dt_try = clamp ? gap : dt_prop;
      StepOutcome out =
          stepper.advance(state, ctrl, dt_try, clamp ? std::optional<double>(target) : std::nullopt);
      if (!(clamp && out.rejections == 0)) dt_prop = out.next_dt;
      state = std::move(out.state);
      if (check_blowup) {
        const double e = weighted_norm_sq(state.u, spectrum, 1.0);
        if (e > kBlowupFactor * energy0 || !std::isfinite(e)) {
          throw BlowupDetected("|A^{1/2}u|^2 grew above ten times its initial value at t=" +
                               std::to_string(state.t) + "; epsilon is outside the decay regime");
        }
      }
      if (++steps > kMaxSteps) throw StepUnderflow("step budget exhausted");
    }
    trace.push(make_sample(state, stepper.coefficient(state), eps));
  }
  return trace;
}

}  // namespace

void StepController::validate() const {
  if (!(eta_b > 0.0 && eta_b < 1.0)) throw InvalidInput("eta_b must lie in (0, 1)");
  if (!(dt_min > 0.0)) throw InvalidInput("dt_min must be > 0");
  if (!(dt_max_factor > 0.0)) throw InvalidInput("dt_max_factor must be > 0");
  if (!(flush_threshold >= 0.0)) throw InvalidInput("flush_threshold must be >= 0");
}

Vector sample_times(double t_end, const SamplingPolicy& policy) {
  if (policy.samples_per_decade < 1) throw InvalidInput("samples_per_decade must be >= 1");
  if (!(policy.t_first > 0.0)) throw InvalidInput("t_first must be > 0");
  Vector out;
  for (int j = 0;; ++j) {
    const double t = policy.t_first * std::pow(10.0, static_cast<double>(j) / policy.samples_per_decade);
    if (t >= t_end * (1.0 - 1e-12)) break;
    out.push_back(t);
  }
  out.push_back(t_end);
  return out;
}

SystemState initial_state(const Problem& problem) {
  SystemState s;
  s.u = problem.u0();
  s.v = problem.u1();
  s.defect.resize(s.u.size());
  const double b0 = problem.b0();
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    const double l = problem.spectrum()[k];
    s.defect[k] = s.v[k] + b0 * l * l * s.u[k];
  }
  return s;
}

Vector accel(const Problem& problem, const SystemState& state) {
  const auto& spec = problem.spectrum();
  if (state.u.size() != spec.size() || state.v.size() != spec.size()) {
    throw DimensionMismatch("state does not match the problem dimension");
  }
  Vector out(state.u.size());
  const double eps = problem.epsilon();
  if (state.defect.size() == state.u.size()) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = -state.defect[k] / eps;
    return out;
  }
  const double b = std::pow(weighted_norm_sq(state.u, spec, 1.0), problem.gamma());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = -(b * spec[k] * spec[k] * state.u[k] + state.v[k]) / eps;
  }
  return out;
}

StepResult step(const Problem& problem, const SystemState& state, const StepController& ctrl,
                double dt_try) {
  ctrl.validate();
  SystemState s = state;
  if (s.defect.size() != s.u.size()) {
    const double b = std::pow(weighted_norm_sq(s.u, problem.spectrum(), 1.0), problem.gamma());
    s.defect.resize(s.u.size());
    for (std::size_t k = 0; k < s.u.size(); ++k) {
      const double l = problem.spectrum()[k];
      s.defect[k] = s.v[k] + b * l * l * s.u[k];
    }
  }
  Stepper stepper(problem.spectrum(), problem.epsilon(),
                  nonlinear_coefficient(problem.spectrum(), problem.gamma()), std::nullopt);
  StepOutcome out = stepper.advance(s, ctrl, dt_try, std::nullopt);
  return StepResult{std::move(out.state), out.dt, out.next_dt};
}

SystemState step(const Problem& problem, const SystemState& state, const StepController& ctrl) {
  return step(problem, state, ctrl, ctrl.dt_max_factor * (1.0 + state.t)).state;
}

Trace evolve(const Problem& problem, double t_end, const StepController& ctrl,
             const SamplingPolicy& sampling) {
  TraceInfo info{.kind = TraceKind::Nonlinear,
                 .spectrum = problem.spectrum(),
                 .epsilon = problem.epsilon(),
                 .gamma = problem.gamma(),
                 .nu = problem.nu(),
                 .b0 = problem.b0(),
                 .u0 = problem.u0(),
                 .u1 = problem.u1(),
                 .coefficient = std::nullopt};
  Stepper stepper(problem.spectrum(), problem.epsilon(),
                  nonlinear_coefficient(problem.spectrum(), problem.gamma()), std::nullopt);
  return run(stepper, problem.spectrum(), initial_state(problem), std::move(info), t_end, ctrl,
             sampling, true);
}

Trace evolve_linear(const Spectrum& spectrum, const LinearCoefficient& coeff, double epsilon,
                    Vector v0, Vector v1, double t_end, const StepController& ctrl,
                    const SamplingPolicy& sampling) {
  if (v0.size() != spectrum.size() || v1.size() != spectrum.size()) {
    throw DimensionMismatch("initial data length must match the number of eigenvalues");
  }
  if (!(epsilon > 0.0) || !(epsilon <= 1.0)) throw InvalidEpsilon("epsilon must lie in (0, 1]");
  SystemState s;
  s.u = v0;
  s.v = v1;
  s.defect.resize(v0.size());
  const double b0 = coeff.value(0.0);
  for (std::size_t k = 0; k < v0.size(); ++k) {
    s.defect[k] = v1[k] + b0 * spectrum[k] * spectrum[k] * v0[k];
  }
  TraceInfo info{.kind = TraceKind::Linear,
                 .spectrum = spectrum,
                 .epsilon = epsilon,
                 .gamma = 0.0,
                 .nu = frequency_of_first_active(spectrum, v0, v1),
                 .b0 = b0,
                 .u0 = std::move(v0),
                 .u1 = std::move(v1),
                 .coefficient = coeff};
  Stepper stepper(spectrum, epsilon, prescribed_coefficient(coeff), coeff);
  return run(stepper, spectrum, std::move(s), std::move(info), t_end, ctrl, sampling, false);
}

Trace reference_solve(const Problem& problem, double t_end, double tol,
                      const SamplingPolicy& sampling) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  if (!(t_end > 0.0) || t_end > 1e3) throw InvalidInput("reference_solve requires 0 < t_end <= 1e3");
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be > 0");

  const auto& spec = problem.spectrum();
  const std::size_t n = spec.size();
  const double eps = problem.epsilon();
  const double gamma = problem.gamma();

  // x = (u, u′, B)
  auto rhs = [&](const State& x, State& dx, double) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += spec[k] * spec[k] * x[k] * x[k];
    const double b = s > 0.0 ? std::pow(s, gamma) : 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      dx[k] = x[n + k];
      dx[n + k] = -(b * spec[k] * spec[k] * x[k] + x[n + k]) / eps;
    }
    dx[2 * n] = b;
  };
  auto to_sample = [&](const State& x, double t) {
    Sample out;
    out.t = t;
    out.u.assign(x.begin(), x.begin() + n);
    out.v.assign(x.begin() + n, x.begin() + 2 * n);
    out.B = x[2 * n];
    double s = 0.0, m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      s += spec[k] * spec[k] * out.u[k] * out.u[k];
      m += spec[k] * spec[k] * out.u[k] * out.v[k];
    }
    out.b = s > 0.0 ? std::pow(s, gamma) : 0.0;
    out.db = s > 0.0 ? 2.0 * gamma * out.b * m / s : 0.0;
    out.defect.resize(n);
    out.accel.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      out.defect[k] = out.v[k] + out.b * spec[k] * spec[k] * out.u[k];
      out.accel[k] = -out.defect[k] / eps;
    }
    return out;
  };

  TraceInfo info{.kind = TraceKind::Nonlinear,
                 .spectrum = spec,
                 .epsilon = eps,
                 .gamma = gamma,
                 .nu = problem.nu(),
                 .b0 = problem.b0(),
                 .u0 = problem.u0(),
                 .u1 = problem.u1(),
                 .coefficient = std::nullopt};
  Trace trace(std::move(info));

  State x(2 * n + 1, 0.0);
  std::copy(problem.u0().begin(), problem.u0().end(), x.begin());
  std::copy(problem.u1().begin(), problem.u1().end(), x.begin() + n);
  trace.push(to_sample(x, 0.0));

  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
  const double dt_cap = 0.25 * eps;
  double t = 0.0;
  double dt = 1e-3 * eps;
  long steps = 0;
  for (double target : sample_times(t_end, sampling)) {
    while (t < target) {
      const double unclamped = std::min(dt, dt_cap);
      const bool clamp = unclamped >= target - t;
      double h = clamp ? target - t : unclamped;
      const double t_before = t;
      if (stepper.try_step(rhs, x, t, h) == odeint::success) {
        if (clamp) {
          t = target;
          dt = std::max(h, unclamped);
        } else {
          dt = h;
        }
      } else {
        dt = h;
        t = t_before;
        if (dt < 1e-14 * (1.0 + t)) {
          throw ToleranceNotMet("reference integrator cannot reach tolerance " +
                                std::to_string(tol) + " at t=" + std::to_string(t));
        }
      }
      if (++steps > kMaxSteps) throw ToleranceNotMet("reference integrator step budget exhausted");
    }
    trace.push(to_sample(x, t));
  }
  return trace;
}

double limit_ode_solution(double t, double y0, double gamma, double nu) {
  if (!(gamma > 0.0)) throw NonPositiveGamma("gamma must be > 0");
  if (!(t >= 0.0)) throw InvalidInput("t must be >= 0");
  if (y0 == 0.0) return 0.0;
  const double base = 1.0 + 2.0 * gamma * nu * nu * std::pow(std::abs(y0), 2.0 * gamma) * t;
  return y0 * std::pow(base, -1.0 / (2.0 * gamma));
}

}  // namespace kirchhoff
