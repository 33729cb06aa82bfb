#include "kirchhoff/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

constexpr double kFrequencyRelTol = 1e-12;

void require_size(std::span<const double> u, const Spectrum& spectrum) {
  if (u.size() != spectrum.size()) {
    throw DimensionMismatch("vector of length " + std::to_string(u.size()) +
                            " does not match spectrum of size " + std::to_string(spectrum.size()));
  }
}

}  // namespace

bool same_frequency(double a, double b) {
  return std::abs(a - b) <= kFrequencyRelTol * std::max(std::abs(a), std::abs(b));
}

bool at_least_frequency(double lambda_k, double lambda) {
  return lambda_k >= lambda || same_frequency(lambda_k, lambda);
}

Spectrum::Spectrum(Vector frequencies) : lambda_(std::move(frequencies)) {
  if (lambda_.empty()) throw InvalidInput("spectrum must be nonempty");
  for (double l : lambda_) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw NonPositiveEigenvalue("eigenvalue frequency must be positive and finite, got " +
                                  std::to_string(l));
    }
  }
  if (!std::is_sorted(lambda_.begin(), lambda_.end())) {
    throw InvalidInput("spectrum must be sorted nondecreasing");
  }
}

Problem::Problem(Spectrum spectrum, double gamma, double epsilon, Vector u0, Vector u1)
    : spectrum_(std::move(spectrum)),
      gamma_(gamma),
      epsilon_(epsilon),
      u0_(std::move(u0)),
      u1_(std::move(u1)) {
  if (u0_.size() != spectrum_.size() || u1_.size() != spectrum_.size()) {
    throw DimensionMismatch("initial data length must match the number of eigenvalues");
  }
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) throw NonPositiveGamma("gamma must be > 0");
  if (!(epsilon_ > 0.0) || !(epsilon_ <= 1.0)) throw InvalidEpsilon("epsilon must lie in (0, 1]");
  for (std::size_t k = 0; k < u0_.size(); ++k) {
    if (!std::isfinite(u0_[k]) || !std::isfinite(u1_[k])) {
      throw InvalidInput("initial data must be finite");
    }
  }
  if (std::all_of(u0_.begin(), u0_.end(), [](double x) { return x == 0.0; })) {
    throw AllZeroInitialData();
  }
  nu_ = 0.0;
  for (std::size_t k = 0; k < u0_.size(); ++k) {
    if (u0_[k] != 0.0 || u1_[k] != 0.0) {
      nu_ = spectrum_[k];
      break;
    }
  }
  b0_ = std::pow(weighted_norm_sq(u0_, spectrum_, 1.0), gamma_);
}

Problem build_problem(Vector eigenvalues, double gamma, double epsilon, Vector u0, Vector u1) {
  if (u0.size() != eigenvalues.size() || u1.size() != eigenvalues.size()) {
    throw DimensionMismatch("eigenvalues, u0 and u1 must have the same length");
  }
  std::vector<std::size_t> order(eigenvalues.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eigenvalues[a] < eigenvalues[b]; });
  Vector lambda(order.size()), a(order.size()), b(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    lambda[i] = eigenvalues[order[i]];
    a[i] = u0[order[i]];
    b[i] = u1[order[i]];
  }
  return Problem(Spectrum(std::move(lambda)), gamma, epsilon, std::move(a), std::move(b));
}

BandDecomposition decompose(std::span<const double> u, const Spectrum& spectrum, double nu,
                            double mu) {
  require_size(u, spectrum);
  if (!(mu > nu)) throw InvalidBand("band split requires mu > nu");
  BandDecomposition out{Vector(u.size(), 0.0), Vector(u.size(), 0.0), Vector(u.size(), 0.0)};
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double l = spectrum[k];
    if (same_frequency(l, nu) || l < nu) {
      out.low[k] = u[k];
    } else if (at_least_frequency(l, mu)) {
      out.high[k] = u[k];
    } else {
      out.mid[k] = u[k];
    }
  }
  return out;
}

double weighted_norm_sq(std::span<const double> u, const Spectrum& spectrum, double h) {
  require_size(u, spectrum);
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double l2 = spectrum[k] * spectrum[k];
    const double w = h == 0.0 ? 1.0 : (h == 1.0 ? l2 : std::pow(l2, h));
    sum += w * u[k] * u[k];
  }
  return sum;
}

Spectrum laplacian_interval_spectrum(int count, double length) {
  if (count < 1) throw InvalidInput("count must be >= 1");
  if (!(length > 0.0)) throw InvalidInput("length must be > 0");
  Vector lambda(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) lambda[k - 1] = k * (std::numbers::pi / length);
  return Spectrum(std::move(lambda));
}

}  // namespace kirchhoff
