#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kirchhoff/spectrum.hpp"
#include "kirchhoff/trace.hpp"

namespace kirchhoff {

/// Nonnegative (or signed) functional carried as sign and natural log of its magnitude.
/// Exponentially weighted quantities e^{2αB}(...) overflow a double long before they stop
/// being bounded in log space.
struct WeightedValue {
  double log_value = -std::numeric_limits<double>::infinity();
  /// +1 or −1; 0 when below floor.
  int sign = 0;
  /// True when the bracket vanished (modes flushed or band empty). Never reported as 0.0.
  bool below_floor = true;
  /// exp(log_value)·sign when that is a finite normal double.
  std::optional<double> raw_hint;

  /// e^{log_weight}·bracket.
  static WeightedValue from_parts(double log_weight, double bracket);
  static WeightedValue floor() { return {}; }

  /// sign·exp(log_value); may be ±inf or 0 for below-floor values.
  double value() const;
};

/// Per-sample D_α, E_α, F_α and G along a trace (G uses the corrector built from b(0)).
struct EnergyRecord {
  double alpha = 0.0;
  Vector times;
  std::vector<WeightedValue> D;
  std::vector<WeightedValue> E;
  std::vector<WeightedValue> F;
  std::vector<WeightedValue> G;
};

/// b = (Σ λ_k² u_k²)^γ; 0 for u = 0.
double b_of(const Problem& problem, std::span<const double> u);
double b_of(const Spectrum& spectrum, double gamma, std::span<const double> u);

struct H2Constants {
  double K3_hat = 0.0;
  double K4_hat = 0.0;
  /// False when (1+t)b or (1+t)|b′|/b keeps growing over the tail.
  bool satisfies_template = false;
};

/// Empirical witnesses of K₃/(1+t) ≤ b ≤ K₄/(1+t), |b′|/b ≤ K₄/(1+t), with b′ from
/// centered differences. Throws DegenerateTrace if some sample has b = 0.
H2Constants h2_constants(const Trace& trace);

struct CorrectorValue {
  Vector theta;
  Vector theta_dot;
  Vector theta_ddot;
};

/// εΘ″ + Θ′ = 0, Θ(0) = 0, Θ′(0) = U₁ + b₀A U₀ on the band λ_k ≥ lambda, zero elsewhere.
CorrectorValue corrector(const Problem& problem, double lambda, double t);
CorrectorValue corrector(const TraceInfo& info, double lambda, double t);

/// D_α = e^{2αB}[ε⟨v,u⟩ + |u|²/2], E_α = e^{2αB}[ε|v|²/b + |A^{1/2}u|²], F_α = e^{2αB}|v|²/b²,
/// G = e^{2αB}|w″|²/b⁴ with w = u − θ (θ over all modes). Throws DegenerateTrace if b = 0 where u ≠ 0.
EnergyRecord energies(const Trace& trace, double alpha);

struct Theorem1Series {
  double lambda = 0.0;
  int h = 0;
  Vector times;
  /// e^{2λ²B}(ε|A^{h/2}U′|²/b + |A^{(h+1)/2}U|²)
  std::vector<WeightedValue> d1;
  /// e^{2λ²B}|U′|²/b²
  std::vector<WeightedValue> d2;
  /// e^{2λ²B}|U″ − Θ″|²/b⁴
  std::vector<WeightedValue> d3;
};

/// Weighted functionals of the high band U (modes with λ_k ≥ lambda). Throws InvalidBand if
/// lambda < ν on a nonlinear trace, InvalidInput if h is not 0 or 1.
Theorem1Series theorem1_functionals(const Trace& trace, double lambda, int h);

struct BetaSeries {
  Vector times;
  /// β₀ = e^{2ν²B}|u_ν|², β₁..β₄ = e^{2ν²B}α_{1..4}.
  std::array<std::vector<WeightedValue>, 5> beta;
};

/// α₁ = |A^{1/2}u|² − ν²|u_ν|², α₂ = |Au|² − ν⁴|u_ν|², α₃ = (|u′|² − |u′_ν|²)/b²,
/// α₄ = (|A^{1/2}u′|² − ν²|u′_ν|²)/b², each summed directly over the modes off the ν-band.
BetaSeries beta_functionals(const Trace& trace);

struct ComparisonResult {
  bool holds = false;
  bool differential_ok = false;
  bool bound_ok = false;
  std::optional<std::size_t> first_violation;
  /// max{f(0), K₆²}
  double bound = 0.0;
};

/// Checks f′ ≤ −K₅√f(√f − K₆) by centered differences (relative slack rel_tol) and the
/// conclusion f ≤ max{f(0), K₆²}.
ComparisonResult comparison_lemma_check(std::span<const double> times, std::span<const double> f,
                                        double K5, double K6, double rel_tol = 1e-3);

/// Max over interior samples of |centered difference − identity right-hand side|, relative to
/// the largest right-hand side magnitude, for each of D_α, E_α, F_α, G. Raw-space evaluation.
struct IdentityResiduals {
  double D = 0.0;
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;
};

IdentityResiduals derivative_identity_residuals(const Trace& trace, double alpha);

/// Nonincreasing energy of a sample: ε|u′|² + |A^{1/2}u|^{2γ+2}/(γ+1) on nonlinear traces,
/// ε|v′|² + b|A^{1/2}v|² on linear ones (nonincreasing while b′ ≤ 0).
double lyapunov_energy(const TraceInfo& info, const Sample& sample);

/// Three-point derivative on a nonuniform grid; second-order one-sided at the ends.
Vector centered_derivative(std::span<const double> t, std::span<const double> y);

/// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace kirchhoff
