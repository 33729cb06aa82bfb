#pragma once

namespace kirchhoff {

/// Prescribed coefficient b(t) for the linear problem εv″ + b(t)Mv + v′ = 0.
class LinearCoefficient {
 public:
  enum class Family { Constant, Power };

  /// b(t) = K. Used for closed-form oracle runs only.
  static LinearCoefficient constant(double K);
  /// b(t) = K/(1+t)^p with p in [0, 1].
  static LinearCoefficient power(double K, double p);

  double value(double t) const;
  double derivative(double t) const;
  /// B(t) = ∫₀ᵗ b, in closed form.
  double integral(double t) const;

  /// b ≤ K₄/(1+t), |b′|/b ≤ K₄/(1+t), |b′|/b² ≤ K₄/K₃ for some constants. Only p = 1 qualifies.
  bool satisfies_h2b() const;

  Family family() const { return family_; }
  double K() const { return K_; }
  double p() const { return p_; }

 private:
  LinearCoefficient(Family family, double K, double p) : family_(family), K_(K), p_(p) {}

  Family family_;
  double K_;
  double p_;
};

}  // namespace kirchhoff
