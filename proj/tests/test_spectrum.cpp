#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/spectrum.hpp"

using namespace kirchhoff;

TEST(BuildProblem, SingleActiveMode) {
  const Problem p = build_problem({1, 2, 3}, 1.0, 0.1, {1, 0, 0}, {0, 0, 0});
  EXPECT_DOUBLE_EQ(p.nu(), 1.0);
  EXPECT_DOUBLE_EQ(p.b0(), 1.0);
}

TEST(BuildProblem, NuIsSmallestFrequencyWithData) {
  const Problem p = build_problem({1, 2, 3}, 1.0, 0.1, {0, 1, 0}, {0, 0, 1});
  EXPECT_DOUBLE_EQ(p.nu(), 2.0);
  EXPECT_DOUBLE_EQ(p.b0(), 4.0);
}

TEST(BuildProblem, VelocityOnlyOnLowerModeSetsNu) {
  const Problem p = build_problem({1, 2}, 1.0, 0.1, {0, 1}, {0.5, 0});
  EXPECT_DOUBLE_EQ(p.nu(), 1.0);
}

TEST(BuildProblem, Errors) {
  EXPECT_THROW(build_problem({1, 2}, 0.5, 0.1, {0, 0}, {1, 0}), AllZeroInitialData);
  EXPECT_THROW(build_problem({1, 2}, 1.0, 0.1, {1}, {0, 0}), DimensionMismatch);
  EXPECT_THROW(build_problem({1, 2}, 1.0, 0.1, {1, 0}, {0}), DimensionMismatch);
  EXPECT_THROW(build_problem({0, 2}, 1.0, 0.1, {1, 0}, {0, 0}), NonPositiveEigenvalue);
  EXPECT_THROW(build_problem({-1, 2}, 1.0, 0.1, {1, 0}, {0, 0}), NonPositiveEigenvalue);
  EXPECT_THROW(build_problem({1, 2}, 0.0, 0.1, {1, 0}, {0, 0}), NonPositiveGamma);
  EXPECT_THROW(build_problem({1, 2}, 1.0, 0.0, {1, 0}, {0, 0}), InvalidEpsilon);
  EXPECT_THROW(build_problem({1, 2}, 1.0, 1.5, {1, 0}, {0, 0}), InvalidEpsilon);
}

TEST(BuildProblem, SortsModesWithTheirData) {
  const Problem p = build_problem({3, 1, 2}, 1.0, 0.1, {0.25, 1, 0.5}, {3, 1, 2});
  ASSERT_EQ(p.size(), 3u);
  EXPECT_DOUBLE_EQ(p.spectrum()[0], 1.0);
  EXPECT_DOUBLE_EQ(p.spectrum()[2], 3.0);
  EXPECT_DOUBLE_EQ(p.u0()[0], 1.0);
  EXPECT_DOUBLE_EQ(p.u0()[1], 0.5);
  EXPECT_DOUBLE_EQ(p.u0()[2], 0.25);
  EXPECT_DOUBLE_EQ(p.u1()[0], 1.0);
  EXPECT_DOUBLE_EQ(p.u1()[2], 3.0);
}

TEST(Spectrum, Invariants) {
  EXPECT_THROW(Spectrum({}), InvalidInput);
  EXPECT_THROW(Spectrum({2, 1}), InvalidInput);
  const Spectrum s({0.5, 1, 1, 2});
  EXPECT_DOUBLE_EQ(s.sigma0(), 0.25);
  EXPECT_DOUBLE_EQ(s.max_frequency(), 2.0);
}

TEST(Decompose, SupportPartition) {
  const Spectrum s({1, 1, 2, 5});
  const Vector u{0.1, -0.2, 0.3, 0.4};
  const BandDecomposition d = decompose(u, s, 1.0, 3.0);
  EXPECT_EQ(d.low, (Vector{0.1, -0.2, 0, 0}));
  EXPECT_EQ(d.mid, (Vector{0, 0, 0.3, 0}));
  EXPECT_EQ(d.high, (Vector{0, 0, 0, 0.4}));
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_EQ(d.low[k] + d.mid[k] + d.high[k], u[k]);
}

TEST(Decompose, ZeroVector) {
  const Spectrum s({1, 2, 3});
  const BandDecomposition d = decompose(Vector{0, 0, 0}, s, 1.0, 2.5);
  for (const Vector* part : {&d.low, &d.mid, &d.high}) {
    for (double x : *part) EXPECT_EQ(x, 0.0);
  }
}

TEST(Decompose, InvalidBand) {
  const Spectrum s({2, 3});
  EXPECT_THROW(decompose(Vector{1, 1}, s, 2.0, 2.0), InvalidBand);
  EXPECT_THROW(decompose(Vector{1, 1}, s, 2.0, 1.0), InvalidBand);
}

TEST(Decompose, IsLinear) {
  const Spectrum s({1, 1, 2, 3, 5});
  const Vector u{1, 2, 3, 4, 5}, v{-0.5, 0.25, 7, -1, 2};
  const double a = 0.75, b = -1.25;
  Vector w(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) w[k] = a * u[k] + b * v[k];
  const auto du = decompose(u, s, 1.0, 2.5), dv = decompose(v, s, 1.0, 2.5),
             dw = decompose(w, s, 1.0, 2.5);
  for (std::size_t k = 0; k < u.size(); ++k) {
    EXPECT_DOUBLE_EQ(dw.low[k], a * du.low[k] + b * dv.low[k]);
    EXPECT_DOUBLE_EQ(dw.mid[k], a * du.mid[k] + b * dv.mid[k]);
    EXPECT_DOUBLE_EQ(dw.high[k], a * du.high[k] + b * dv.high[k]);
  }
}

TEST(WeightedNorm, Examples) {
  EXPECT_DOUBLE_EQ(weighted_norm_sq(Vector{0.5, 0.25}, Spectrum({1, 2}), 1.0), 0.5);
  EXPECT_DOUBLE_EQ(weighted_norm_sq(Vector{1}, Spectrum({2}), 2.0), 16.0);
  EXPECT_DOUBLE_EQ(weighted_norm_sq(Vector{3, 4}, Spectrum({2, 7}), 0.0), 25.0);
  EXPECT_THROW(weighted_norm_sq(Vector{1, 2}, Spectrum({1}), 1.0), DimensionMismatch);
}

TEST(WeightedNorm, Coercivity) {
  const Spectrum s({0.7, 1.3, 2.0, 4.5});
  const Vector u{0.3, -1.1, 0.2, 0.05};
  for (double h : {0.5, 1.0, 2.0}) {
    EXPECT_GE(weighted_norm_sq(u, s, h), std::pow(s.sigma0(), h) * weighted_norm_sq(u, s, 0.0));
  }
}

TEST(WeightedNorm, PythagorasOnBands) {
  const Spectrum s({1, 1, 2, 3, 5});
  const Vector u{0.4, -0.3, 0.2, 1e-3, 7e-5};
  const auto d = decompose(u, s, 1.0, 3.0);
  for (double h : {0.0, 1.0, 2.0}) {
    const double whole = weighted_norm_sq(u, s, h);
    const double parts = weighted_norm_sq(d.low, s, h) + weighted_norm_sq(d.mid, s, h) +
                         weighted_norm_sq(d.high, s, h);
    EXPECT_NEAR(parts, whole, 1e-12 * whole);
  }
}

TEST(LaplacianPreset, Examples) {
  const Spectrum a = laplacian_interval_spectrum(3, std::numbers::pi);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_NEAR(a[0], 1.0, 1e-15);
  EXPECT_NEAR(a[1], 2.0, 1e-15);
  EXPECT_NEAR(a[2], 3.0, 1e-15);
  const Spectrum b = laplacian_interval_spectrum(1, 1.0);
  EXPECT_DOUBLE_EQ(b[0], std::numbers::pi);
  const Spectrum c = laplacian_interval_spectrum(2, 2.0);
  EXPECT_DOUBLE_EQ(c[0], std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(c[1], std::numbers::pi);
  EXPECT_THROW(laplacian_interval_spectrum(0, 1.0), InvalidInput);
  EXPECT_THROW(laplacian_interval_spectrum(2, 0.0), InvalidInput);
}
