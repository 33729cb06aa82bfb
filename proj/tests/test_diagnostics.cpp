#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "kirchhoff/diagnostics.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/integrator.hpp"

using namespace kirchhoff;

namespace {

TraceInfo scalar_info(double eps, double b0, double u0, double u1, double lambda = 1.0) {
  return TraceInfo{.kind = TraceKind::Nonlinear,
                   .spectrum = Spectrum({lambda}),
                   .epsilon = eps,
                   .gamma = 1.0,
                   .nu = lambda,
                   .b0 = b0,
                   .u0 = {u0},
                   .u1 = {u1},
                   .coefficient = std::nullopt};
}

Sample scalar_sample(double t, double u, double v, double b, double B, double eps,
                     double lambda = 1.0) {
  Sample s;
  s.t = t;
  s.u = {u};
  s.v = {v};
  s.b = b;
  s.B = B;
  s.defect = {v + b * lambda * lambda * u};
  s.accel = {-s.defect[0] / eps};
  return s;
}

Trace reference_run() {
  const Problem p = build_problem({1, 2, 3}, 1.0, 0.05, {1, 0.5, 0.25}, {0, 0, 0});
  return evolve(p, 1e5, StepController{});
}

double direct_log(double value) { return std::log(value); }

}  // namespace

TEST(BOf, Examples) {
  EXPECT_DOUBLE_EQ(b_of(Spectrum({1, 2}), 1.0, Vector{0.5, 0.25}), 0.5);
  EXPECT_DOUBLE_EQ(b_of(Spectrum({2}), 0.5, Vector{1}), 2.0);
  EXPECT_EQ(b_of(Spectrum({1, 2}), 1.0, Vector{0, 0}), 0.0);
  const Problem p = build_problem({1, 2}, 1.0, 0.1, {0.5, 0.25}, {0, 0});
  EXPECT_DOUBLE_EQ(b_of(p, p.u0()), p.b0());
}

TEST(WeightedValueTest, FromParts) {
  const WeightedValue w = WeightedValue::from_parts(2.0, 3.0);
  EXPECT_FALSE(w.below_floor);
  EXPECT_EQ(w.sign, 1);
  EXPECT_DOUBLE_EQ(w.log_value, 2.0 + std::log(3.0));
  ASSERT_TRUE(w.raw_hint.has_value());
  EXPECT_NEAR(*w.raw_hint, 3.0 * std::exp(2.0), 1e-12 * 3.0 * std::exp(2.0));

  const WeightedValue n = WeightedValue::from_parts(0.0, -0.5);
  EXPECT_EQ(n.sign, -1);
  EXPECT_DOUBLE_EQ(n.value(), -0.5);

  const WeightedValue big = WeightedValue::from_parts(1e4, 1.0);
  EXPECT_FALSE(big.raw_hint.has_value());
  EXPECT_DOUBLE_EQ(big.log_value, 1e4);

  const WeightedValue z = WeightedValue::from_parts(5.0, 0.0);
  EXPECT_TRUE(z.below_floor);
  EXPECT_TRUE(std::isinf(z.log_value) && z.log_value < 0);
}

TEST(Corrector, Examples) {
  const TraceInfo info = scalar_info(0.1, 1.0, 1.0, 0.0, 2.0);
  const CorrectorValue c0 = corrector(info, 2.0, 0.0);
  EXPECT_EQ(c0.theta[0], 0.0);
  EXPECT_DOUBLE_EQ(c0.theta_dot[0], 4.0);
  EXPECT_DOUBLE_EQ(c0.theta_ddot[0], -40.0);
  const CorrectorValue c1 = corrector(info, 2.0, 0.3);
  EXPECT_NEAR(c1.theta[0], 0.4 * (1 - std::exp(-3.0)), 1e-15);
  EXPECT_NEAR(c1.theta_dot[0], 4.0 * std::exp(-3.0), 1e-15);
  const CorrectorValue c_inf = corrector(info, 2.0, 100.0);
  EXPECT_DOUBLE_EQ(c_inf.theta[0], 0.4);

  const TraceInfo zero = scalar_info(0.1, 1.0, 0.0, 0.0, 2.0);
  const CorrectorValue cz = corrector(zero, 2.0, 0.7);
  EXPECT_EQ(cz.theta[0], 0.0);
  EXPECT_EQ(cz.theta_dot[0], 0.0);
  EXPECT_EQ(cz.theta_ddot[0], 0.0);
}

TEST(Corrector, RestrictedToBand) {
  const Problem p = build_problem({1, 2, 3}, 1.0, 0.1, {1, 0.5, 0.25}, {0.1, 0.2, 0.3});
  const CorrectorValue c = corrector(p, 2.0, 0.0);
  EXPECT_EQ(c.theta_dot[0], 0.0);
  EXPECT_DOUBLE_EQ(c.theta_dot[1], 0.2 + p.b0() * 4 * 0.5);
  EXPECT_DOUBLE_EQ(c.theta_dot[2], 0.3 + p.b0() * 9 * 0.25);
}

TEST(Energies, ScalarExample) {
  Trace tr(scalar_info(0.1, 1.0, 1.0, -1.0));
  tr.push(scalar_sample(0.0, 1.0, -1.0, 1.0, 0.0, 0.1));
  const EnergyRecord e = energies(tr, 1.0);
  EXPECT_NEAR(e.D[0].value(), 0.4, 1e-15);
  EXPECT_NEAR(e.E[0].value(), 0.1 + 1.0, 1e-15);
  EXPECT_NEAR(e.F[0].value(), 1.0, 1e-15);
}

TEST(Energies, NegativeDKeepsSign) {
  Trace tr(scalar_info(0.5, 1.0, 1.0, -2.0));
  tr.push(scalar_sample(0.0, 1.0, -2.0, 1.0, 0.3, 0.5));
  const EnergyRecord e = energies(tr, 2.0);
  EXPECT_EQ(e.D[0].sign, -1);
  EXPECT_NEAR(e.D[0].value(), std::exp(1.2) * (0.5 * -2.0 + 0.5), 1e-12);
}

TEST(Energies, AlphaZeroIsUnweighted) {
  const Trace tr = reference_run();
  const EnergyRecord e = energies(tr, 0.0);
  const auto& spec = tr.info().spectrum;
  for (std::size_t i = 0; i < tr.size(); i += 7) {
    const Sample& s = tr[i];
    const double E = 0.05 * weighted_norm_sq(s.v, spec, 0.0) / s.b + weighted_norm_sq(s.u, spec, 1.0);
    EXPECT_NEAR(e.E[i].value(), E, 1e-12 * E);
  }
}

TEST(Energies, LogSpaceMatchesDirectComputation) {
  const Trace tr = reference_run();
  const double alpha = 0.7;
  const EnergyRecord e = energies(tr, alpha);
  const auto& spec = tr.info().spectrum;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const Sample& s = tr[i];
    const double w = std::exp(2 * alpha * s.B);
    const double F = w * weighted_norm_sq(s.v, spec, 0.0) / (s.b * s.b);
    if (!std::isnormal(F)) continue;
    ASSERT_TRUE(e.F[i].raw_hint.has_value());
    EXPECT_NEAR(*e.F[i].raw_hint, F, 1e-12 * F);
    EXPECT_NEAR(e.F[i].log_value, direct_log(F), 1e-12 * std::max(1.0, std::abs(direct_log(F))));
  }
}

TEST(Energies, ConstantCoefficientLyapunovDecreases) {
  const Trace tr = evolve_linear(Spectrum({1, 2}), LinearCoefficient::constant(1.0), 0.1, {1, 0.5},
                                 {0.3, 0}, 50.0, StepController{});
  const EnergyRecord e = energies(tr, 0.0);
  for (std::size_t i = 1; i < tr.size(); ++i) {
    EXPECT_LE(e.E[i].value(), e.E[i - 1].value() * (1 + 1e-12));
  }
}

TEST(Energies, DegenerateTraceThrows) {
  Trace tr(scalar_info(0.1, 1.0, 1.0, 0.0));
  tr.push(scalar_sample(0.0, 1.0, 0.0, 0.0, 0.0, 0.1));
  EXPECT_THROW(energies(tr, 1.0), DegenerateTrace);
}

TEST(Theorem1Functionals, FullBandEqualsWeightedEnergy) {
  const Trace tr = reference_run();
  const Theorem1Series s = theorem1_functionals(tr, 1.0, 0);
  const EnergyRecord e = energies(tr, 1.0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    for (auto [a, b] : {std::pair{&s.d1[i], &e.E[i]}, std::pair{&s.d2[i], &e.F[i]}}) {
      ASSERT_EQ(a->below_floor, b->below_floor);
      if (!b->below_floor) EXPECT_NEAR(a->log_value, b->log_value, 1e-12 * std::max(1.0, std::abs(b->log_value)));
    }
  }
}

TEST(Theorem1Functionals, EmptyBandIsBelowFloor) {
  const Trace tr = reference_run();
  const Theorem1Series s = theorem1_functionals(tr, 4.0, 1);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_TRUE(s.d1[i].below_floor);
    EXPECT_TRUE(s.d2[i].below_floor);
    EXPECT_TRUE(s.d3[i].below_floor);
  }
}

TEST(Theorem1Functionals, NeverOverflowOnHighBand) {
  const Trace tr = reference_run();
  for (double lambda : {2.0, 3.0}) {
    for (int h : {0, 1}) {
      const Theorem1Series s = theorem1_functionals(tr, lambda, h);
      for (std::size_t i = 0; i < tr.size(); ++i) {
        for (const auto* series : {&s.d1, &s.d2, &s.d3}) {
          const WeightedValue& w = (*series)[i];
          EXPECT_TRUE(w.below_floor || std::isfinite(w.log_value));
          EXPECT_LT(w.log_value, 50.0);
        }
      }
    }
  }
}

TEST(Theorem1Functionals, Preconditions) {
  const Problem p = build_problem({1, 2, 3}, 1.0, 0.05, {0, 0.5, 0.25}, {0, 0, 0});
  const Trace tr = evolve(p, 10.0, StepController{});
  EXPECT_THROW(theorem1_functionals(tr, 1.0, 0), InvalidBand);
  EXPECT_THROW(theorem1_functionals(tr, 2.0, 2), InvalidInput);
  EXPECT_NO_THROW(theorem1_functionals(tr, 2.0, 1));
}

TEST(BetaFunctionals, SingleModeHasNoOffBand) {
  const Problem p = build_problem({1, 2}, 1.0, 0.05, {1, 0}, {0, 0});
  const Trace tr = evolve(p, 1e3, StepController{});
  const BetaSeries b = beta_functionals(tr);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    for (int k = 1; k <= 4; ++k) EXPECT_TRUE(b.beta[k][i].below_floor);
    EXPECT_FALSE(b.beta[0][i].below_floor);
  }
}

TEST(BetaFunctionals, ConsistencyIdentityInLogSpace) {
  const Trace tr = reference_run();
  const BetaSeries b = beta_functionals(tr);
  const double nu2 = 1.0;
  const auto& spec = tr.info().spectrum;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const Sample& s = tr[i];
    const double lhs_log = std::log(nu2 * b.beta[0][i].value() + b.beta[1][i].value());
    const double rhs_log = 2 * nu2 * s.B + std::log(weighted_norm_sq(s.u, spec, 1.0));
    EXPECT_NEAR(lhs_log, rhs_log, 1e-12 * std::max(1.0, std::abs(rhs_log)));
  }
}

TEST(BetaFunctionals, BetaZeroStaysAboveFloorAndOffBandDecays) {
  const Trace tr = reference_run();
  const BetaSeries b = beta_functionals(tr);
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& w : b.beta[0]) lo = std::min(lo, w.value());
  EXPECT_GT(lo, 0.5);
  for (int k = 1; k <= 4; ++k) EXPECT_LT(b.beta[k].back().log_value, b.beta[k][tr.size() / 2].log_value);
}

TEST(H2Constants, PowerFamilyIsExact) {
  const Trace tr = evolve_linear(Spectrum({1, 2}), LinearCoefficient::power(1.0, 1.0), 0.05, {1, 0.5},
                                 {0, 0}, 1e4, StepController{}, SamplingPolicy{.samples_per_decade = 50});
  const H2Constants h = h2_constants(tr);
  EXPECT_NEAR(h.K3_hat, 1.0, 1e-12);
  EXPECT_NEAR(h.K4_hat, 1.0, 1e-2);
  EXPECT_TRUE(h.satisfies_template);
}

TEST(H2Constants, NonlinearRunBracketsLimit) {
  const H2Constants h = h2_constants(reference_run());
  EXPECT_LE(h.K3_hat, 0.5);
  EXPECT_GE(h.K4_hat, 0.5);
  EXPECT_GT(h.K3_hat, 0.25);
  EXPECT_TRUE(h.satisfies_template);
}

TEST(H2Constants, ConstantCoefficientViolatesTemplate) {
  const Trace tr = evolve_linear(Spectrum({1}), LinearCoefficient::constant(1.0), 0.05, {1}, {0},
                                 1e3, StepController{});
  const H2Constants h = h2_constants(tr);
  EXPECT_GT(h.K4_hat, 900.0);
  EXPECT_FALSE(h.satisfies_template);
}

TEST(H2Constants, DegenerateTrace) {
  Trace tr(scalar_info(0.1, 1.0, 1.0, 0.0));
  tr.push(scalar_sample(0.0, 1.0, 0.0, 1.0, 0.0, 0.1));
  tr.push(scalar_sample(1.0, 0.0, 0.0, 0.0, 0.5, 0.1));
  EXPECT_THROW(h2_constants(tr), DegenerateTrace);
}

TEST(ComparisonLemma, ExponentialDecayHolds) {
  Vector t, f;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(0.05 * i);
    f.push_back(2.0 * std::exp(-0.8 * t.back()));
  }
  const ComparisonResult r = comparison_lemma_check(t, f, 0.8, 0.0);
  EXPECT_TRUE(r.holds);
  EXPECT_DOUBLE_EQ(r.bound, 2.0);
  EXPECT_FALSE(r.first_violation.has_value());
}

TEST(ComparisonLemma, FixedPoint) {
  const Vector t{0, 1, 2, 3, 4}, f(5, 0.49);
  const ComparisonResult r = comparison_lemma_check(t, f, 1.0, 0.7);
  EXPECT_TRUE(r.holds);
  EXPECT_DOUBLE_EQ(r.bound, 0.49);
}

TEST(ComparisonLemma, IncreasingFails) {
  const Vector t{0, 1, 2, 3, 4}, f{1, 1.1, 1.2, 1.3, 1.4};
  const ComparisonResult r = comparison_lemma_check(t, f, 1.0, 0.0);
  EXPECT_FALSE(r.holds);
  EXPECT_FALSE(r.differential_ok);
  ASSERT_TRUE(r.first_violation.has_value());
  EXPECT_EQ(*r.first_violation, 1u);
}

TEST(CenteredDerivative, ExactForQuadraticsOnNonuniformGrid) {
  const Vector t{0.0, 0.1, 0.35, 0.4, 1.0, 2.5};
  Vector y;
  for (double x : t) y.push_back(3 * x * x - 2 * x + 1);
  const Vector d = centered_derivative(t, y);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(d[i], 6 * t[i] - 2, 1e-12);
}

TEST(LeastSquaresSlope, Line) {
  const Vector x{1, 2, 4, 8}, y{3, 5, 9, 17};
  EXPECT_NEAR(least_squares_slope(x, y), 2.0, 1e-14);
  EXPECT_THROW(least_squares_slope(Vector{1}, Vector{1}), InsufficientTail);
}

TEST(DerivativeIdentities, SecondOrderUnderSampleRefinement) {
  // Residuals shrink by about 4 per halving of the sample spacing. t_first shrinks with the
  // spacing so the gap after t = 0 is refined too.
  const Problem p = build_problem({1, 2}, 1.0, 0.1, {1, 0.5}, {0.2, -0.1});
  const LinearCoefficient c = LinearCoefficient::power(1.0, 1.0);
  StepController ctrl;
  ctrl.eta_b = 1e-5;
  for (bool linear : {false, true}) {
    auto residuals = [&](int spd) {
      const SamplingPolicy sp{.samples_per_decade = spd, .t_first = 5.0 / spd};
      const Trace tr = linear ? evolve_linear(p.spectrum(), c, 0.1, p.u0(), p.u1(), 3.0, ctrl, sp)
                              : evolve(p, 3.0, ctrl, sp);
      return derivative_identity_residuals(tr, 0.5);
    };
    const IdentityResiduals r1 = residuals(100), r2 = residuals(200);
    EXPECT_GE(r1.D / r2.D, 3.0) << "linear=" << linear;
    EXPECT_GE(r1.E / r2.E, 3.0) << "linear=" << linear;
    EXPECT_GE(r1.F / r2.F, 3.0) << "linear=" << linear;
    EXPECT_GE(r1.G / r2.G, 3.0) << "linear=" << linear;
    EXPECT_LE(std::max({r2.D, r2.E, r2.F, r2.G}), 1e-3) << "linear=" << linear;
  }
}

TEST(LyapunovEnergy, MatchesDefinition) {
  Trace tr(scalar_info(0.1, 4.0, 2.0, 0.0));
  const Sample s = scalar_sample(0.0, 2.0, 1.0, 4.0, 0.0, 0.1);
  EXPECT_DOUBLE_EQ(lyapunov_energy(tr.info(), s), 0.1 * 1.0 + 16.0 / 2.0);
}
