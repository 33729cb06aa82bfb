#pragma once

#include "kirchhoff/coefficient.hpp"
#include "kirchhoff/spectrum.hpp"
#include "kirchhoff/trace.hpp"

namespace kirchhoff {

struct SystemState {
  double t = 0.0;
  Vector u;
  Vector v;
  /// ∫₀ᵗ b.
  double B = 0.0;
  /// w_k = v_k + bλ_k²u_k. Carried so that u″ = −w/ε is available without cancellation.
  Vector defect;
};

/// State at t = 0 built from the problem data.
SystemState initial_state(const Problem& problem);

/// Adaptive step-size policy.
struct StepController {
  /// Maximum relative change of b per step.
  double eta_b = 1e-3;
  double dt_min = 1e-12;
  /// dt ≤ dt_max_factor·(1+t).
  double dt_max_factor = 0.1;
  /// Modes with |u_k| and |v_k| below this are set to zero.
  double flush_threshold = 1e-300;

  /// Throws InvalidInput on out-of-range settings.
  void validate() const;
};

/// Log-spaced sampling of a trajectory.
struct SamplingPolicy {
  int samples_per_decade = 20;
  double t_first = 1e-3;
};

/// Sample times after t = 0 (which evolve always records): t_first·10^{j/samples_per_decade}
/// below t_end, then t_end itself.
Vector sample_times(double t_end, const SamplingPolicy& policy);

/// u″_k = −(bλ_k²u_k + v_k)/ε with b = |A^{1/2}u|^{2γ}. Uses the state's defect when present.
Vector accel(const Problem& problem, const SystemState& state);

struct StepResult {
  SystemState state;
  double dt = 0.0;
  /// Step size suggested for the next step.
  double next_dt = 0.0;
};

/// One accepted step of the frozen-coefficient exponential scheme, trying `dt_try` first.
/// Throws StepUnderflow when the controller would need dt < dt_min.
StepResult step(const Problem& problem, const SystemState& state, const StepController& ctrl,
                double dt_try);

/// Same, starting from dt_max_factor·(1+t).
SystemState step(const Problem& problem, const SystemState& state, const StepController& ctrl);

/// Integrates the nonlinear mode system up to t_end. Throws StepUnderflow, or BlowupDetected
/// when |A^{1/2}u|² exceeds ten times its initial value.
Trace evolve(const Problem& problem, double t_end, const StepController& ctrl,
             const SamplingPolicy& sampling = {});

/// Integrates εv″ + b(t)Av + v′ = 0 with b prescribed. B comes from the closed-form integral.
Trace evolve_linear(const Spectrum& spectrum, const LinearCoefficient& coeff, double epsilon,
                    Vector v0, Vector v1, double t_end, const StepController& ctrl,
                    const SamplingPolicy& sampling = {});

/// High-order explicit adaptive integration of the full nonlinear system in (u, u′), with the
/// step bounded by ε/4. Intended as a test oracle for t_end ≤ 1e3. Throws ToleranceNotMet.
Trace reference_solve(const Problem& problem, double t_end, double tol,
                      const SamplingPolicy& sampling = {});

/// Solution of y′ + ν²|y|^{2γ}y = 0, y(0) = y0.
double limit_ode_solution(double t, double y0, double gamma, double nu);

}  // namespace kirchhoff
