#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kirchhoff {

using Vector = std::vector<double>;

/// Frequencies λ_k of the operator A (A e_k = λ_k² e_k), sorted nondecreasing.
/// Multiplicity is expressed by repetition.
class Spectrum {
 public:
  /// Throws NonPositiveEigenvalue, or InvalidInput if empty or unsorted.
  explicit Spectrum(Vector frequencies);

  std::size_t size() const { return lambda_.size(); }
  double operator[](std::size_t k) const { return lambda_[k]; }
  std::span<const double> frequencies() const { return lambda_; }

  /// Coercivity constant σ₀ = min λ_k².
  double sigma0() const { return lambda_.front() * lambda_.front(); }
  double max_frequency() const { return lambda_.back(); }

 private:
  Vector lambda_;
};

/// Validated initial-value problem εu″ + |A^{1/2}u|^{2γ}Au + u′ = 0.
class Problem {
 public:
  Problem(Spectrum spectrum, double gamma, double epsilon, Vector u0, Vector u1);

  const Spectrum& spectrum() const { return spectrum_; }
  double gamma() const { return gamma_; }
  double epsilon() const { return epsilon_; }
  const Vector& u0() const { return u0_; }
  const Vector& u1() const { return u1_; }
  std::size_t size() const { return spectrum_.size(); }

  /// Smallest frequency carrying nonzero initial data.
  double nu() const { return nu_; }
  /// b₀ = |A^{1/2}u₀|^{2γ}.
  double b0() const { return b0_; }

 private:
  Spectrum spectrum_;
  double gamma_;
  double epsilon_;
  Vector u0_;
  Vector u1_;
  double nu_;
  double b0_;
};

/// u = low + mid + high with low on {λ_k = ν}, mid on ν < λ_k < μ, high on λ_k ≥ μ.
/// Modes below ν (always zero along a trajectory) are folded into `low`.
struct BandDecomposition {
  Vector low;
  Vector mid;
  Vector high;
};

/// Sorts modes by frequency and validates. Throws AllZeroInitialData, DimensionMismatch,
/// NonPositiveEigenvalue, NonPositiveGamma or InvalidEpsilon.
Problem build_problem(Vector eigenvalues, double gamma, double epsilon, Vector u0, Vector u1);

BandDecomposition decompose(std::span<const double> u, const Spectrum& spectrum, double nu,
                            double mu);

/// |A^{h/2}u|² = Σ λ_k^{2h} u_k².
double weighted_norm_sq(std::span<const double> u, const Spectrum& spectrum, double h);

/// Dirichlet Laplacian on (0, length): λ_k = kπ/length, k = 1..count.
Spectrum laplacian_interval_spectrum(int count, double length);

/// Frequency comparisons used for band membership (relative tolerance 1e-12).
bool same_frequency(double a, double b);
bool at_least_frequency(double lambda_k, double lambda);

}  // namespace kirchhoff
