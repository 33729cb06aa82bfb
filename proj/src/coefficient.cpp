#include "kirchhoff/coefficient.hpp"

#include <cmath>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

LinearCoefficient LinearCoefficient::constant(double K) {
  if (!(K > 0.0) || !std::isfinite(K)) throw InvalidInput("coefficient K must be > 0");
  return {Family::Constant, K, 0.0};
}

LinearCoefficient LinearCoefficient::power(double K, double p) {
  if (!(K > 0.0) || !std::isfinite(K)) throw InvalidInput("coefficient K must be > 0");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("power-family exponent p must lie in [0, 1]");
  return {Family::Power, K, p};
}

double LinearCoefficient::value(double t) const {
  if (family_ == Family::Constant || p_ == 0.0) return K_;
  return K_ * std::pow(1.0 + t, -p_);
}

double LinearCoefficient::derivative(double t) const {
  if (family_ == Family::Constant || p_ == 0.0) return 0.0;
  return -p_ * K_ * std::pow(1.0 + t, -p_ - 1.0);
}

double LinearCoefficient::integral(double t) const {
  if (family_ == Family::Constant || p_ == 0.0) return K_ * t;
  if (p_ == 1.0) return K_ * std::log1p(t);
  // ((1+t)^{1-p} - 1)/(1-p) without cancellation for small t
  const double s = 1.0 - p_;
  return K_ * std::expm1(s * std::log1p(t)) / s;
}

bool LinearCoefficient::satisfies_h2b() const {
  return family_ == Family::Power && p_ == 1.0;
}

}  // namespace kirchhoff
