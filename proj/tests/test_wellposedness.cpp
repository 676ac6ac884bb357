#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "spde/covariance.hpp"
#include "spde/errors.hpp"
#include "spde/initial_data.hpp"
#include "spde/symbols.hpp"
#include "spde/wellposedness.hpp"

using namespace spde;

namespace {

constexpr double pi = std::numbers::pi;

// Density identically one.
SpectralMeasure unit_density(int d) { return sobolev_bound_measure(d, 0.0, 1.0); }

void expect_trace_invariant(const ConditionVerdict& v, double rel_tol, double factor = 1.05) {
  if (v.status == Verdict::convergent) {
    EXPECT_LE(v.tail_estimate, rel_tol * v.value);
  } else if (v.status == Verdict::divergent) {
    const auto& p = v.refinement_trace;
    ASSERT_GE(p.size(), 4u);
    for (std::size_t i = p.size() - 3; i < p.size(); ++i) EXPECT_GE(p[i], factor * p[i - 1]);
  }
}

}  // namespace

TEST(Dalang, HeatUnitDensityClosedForm) {
  const auto v = dalang_integral(heat_symbol(1), unit_density(1), 2.0);
  ASSERT_TRUE(v.convergent());
  // int dxi / (2 + 2 xi^2) = pi / 2.
  EXPECT_NEAR(v.value, pi / 2.0, 1e-6 * pi / 2.0);
  EXPECT_NEAR(v.value, 2.0 * oracle::half_line([](double x) { return 1.0 / (2.0 + 2.0 * x * x); }), 1e-6);
  expect_trace_invariant(v, 1e-6);
  EXPECT_EQ(v.beta, 2.0);
}

TEST(Dalang, HeatRieszPlaneClosedForm) {
  const auto v = dalang_integral(heat_symbol(2), riesz_measure(2, 1.0), 2.0);
  ASSERT_TRUE(v.convergent());
  // 2 pi int dr / (2 + 2 r^2) = pi^2 / 2.
  EXPECT_NEAR(v.value, pi * pi / 2.0, 1e-5 * pi * pi / 2.0);
  expect_trace_invariant(v, 1e-6);
}

TEST(Dalang, WhiteNoiseOnlyInDimensionOne) {
  const auto v1 = dalang_integral(heat_symbol(1), white_noise_measure(1), 2.0);
  ASSERT_TRUE(v1.convergent());
  EXPECT_NEAR(v1.value, 0.25, 1e-6);
  const auto v2 = dalang_integral(heat_symbol(2), white_noise_measure(2), 2.0);
  EXPECT_EQ(v2.status, Verdict::divergent);
  expect_trace_invariant(v2, 1e-6);
  EXPECT_EQ(dalang_integral(heat_symbol(3), white_noise_measure(3), 2.0).status, Verdict::divergent);
}

TEST(Dalang, RieszGrowsTowardsCriticalExponent) {
  double previous = 0.0;
  for (double lambda : {1.0, 1.5, 1.9, 1.95}) {
    const auto v = dalang_integral(heat_symbol(2), riesz_measure(2, lambda), 2.0);
    ASSERT_TRUE(v.convergent()) << lambda;
    EXPECT_GT(v.value, previous);
    previous = v.value;
  }
  // Closed form 2 pi int r^{lambda - 1} / (2 + 2 r^2) dr = pi^2 / (2 sin(pi lambda / 2)) for beta = 2.
  const auto v = dalang_integral(heat_symbol(2), riesz_measure(2, 1.9), 2.0);
  EXPECT_NEAR(v.value, pi * pi / (2.0 * std::sin(pi * 0.95)), 1e-5 * v.value);
  // Tail r^{-1.01}: too slow to certify, but never called divergent.
  EXPECT_NE(dalang_integral(heat_symbol(2), riesz_measure(2, 1.99), 2.0).status, Verdict::divergent);
}

TEST(Dalang, RequiresBetaAboveTwiceLowerBound) {
  EXPECT_THROW(dalang_integral(fractional_heat_symbol(1, 0.5, 1.0), white_noise_measure(1), 2.0),
               PreconditionError);
  EXPECT_TRUE(dalang_integral(fractional_heat_symbol(1, 0.75, 1.0), white_noise_measure(1), 2.5).convergent());
}

TEST(Dalang, SobolevThreshold) {
  // heat d = n: convergent iff k > n - 2.
  for (int n : {1, 2, 3}) {
    const auto above = dalang_integral(heat_symbol(n), sobolev_bound_measure(n, std::max(0.0, n - 1.5), 1.0), 1.0);
    const auto below = dalang_integral(heat_symbol(n), sobolev_bound_measure(n, std::max(0.0, n - 2.5), 1.0), 1.0);
    EXPECT_EQ(above.status, Verdict::convergent) << n;
    if (n >= 3) {
      EXPECT_EQ(below.status, Verdict::divergent) << n;
    }
  }
}

TEST(Dalang, MixtureDominatedByHeat) {
  const auto mixed = mixture_symbol(heat_symbol(1), fractional_heat_symbol(1, 0.5, 0.0));
  const auto a = dalang_integral(mixed, white_noise_measure(1), 2.0);
  const auto b = dalang_integral(heat_symbol(1), white_noise_measure(1), 2.0);
  ASSERT_TRUE(a.convergent());
  EXPECT_LT(a.value, b.value);
}

TEST(Deterministic, HeatLaplaceTransform) {
  const auto v = deterministic_condition(heat_kernel(1), 2.0);
  ASSERT_TRUE(v.convergent());
  EXPECT_NEAR(v.value, 0.5, 1e-12);
}

TEST(Deterministic, FractionalMassGain) {
  const auto v = deterministic_condition(fractional_heat_kernel(1, 0.5, 1.0), 3.0);
  ASSERT_TRUE(v.convergent());
  EXPECT_NEAR(v.value, 0.5, 1e-12);
  EXPECT_EQ(deterministic_condition(fractional_heat_kernel(1, 0.5, 1.0), 0.5).status, Verdict::divergent);
}

TEST(Deterministic, SkippedWithoutDrift) {
  DeterministicOptions opt;
  opt.drift_is_zero = true;
  const auto v = deterministic_condition(fractional_heat_kernel(1, 0.5, 1.0), 0.1, opt);
  EXPECT_TRUE(v.convergent());
  EXPECT_EQ(v.value, 0.0);
}

TEST(Deterministic, FiniteHorizon) {
  DeterministicOptions opt;
  opt.horizon = 2.5;
  EXPECT_NEAR(deterministic_condition(heat_kernel(2), 1.0, opt).value, 2.5, 1e-12);
  const auto g = fractional_heat_kernel(1, 0.5, 2.0);
  EXPECT_NEAR(deterministic_condition(g, 1.0, opt).value, std::expm1(5.0) / 2.0, 1e-9);
}

TEST(Deterministic, CustomLawByQuadrature) {
  // ||g_s||_1 = s^{-1/2}: Laplace transform sqrt(pi / beta).
  const auto base = heat_kernel(1);
  const DominatingKernel k(1, KernelFamily::heat, base.symbol(), 1.0, nullptr,
                           L1Law::from_function([](double s) { return 1.0 / std::sqrt(s); }), false, "custom");
  const auto v = deterministic_condition(k, 2.0);
  ASSERT_TRUE(v.convergent());
  EXPECT_NEAR(v.value, std::sqrt(pi / 2.0), 1e-6);
}

TEST(IOfS, HeatUnitDensity) {
  EXPECT_NEAR(I_of_s(heat_kernel(1), unit_density(1), 0.5), 1.0 + std::sqrt(pi), 1e-9);
}

TEST(IOfS, SpectralPartDecreasing) {
  const auto k = heat_kernel(2);
  const auto m = riesz_measure(2, 1.0);
  double previous = spectral_part(k, m, 0.01);
  for (double s = 0.02; s < 100.0; s *= 2.0) {
    const double v = spectral_part(k, m, s);
    EXPECT_LT(v, previous);
    previous = v;
  }
}

TEST(IOfS, GaussianBoundInThePlane) {
  // A^2 int e^{-s r^2 / (2 c2)} (2 pi)^{-2} dxi = A^2 c2 / (2 pi s): finite at each s, not integrable at 0.
  const double c1 = 0.3, c2 = 0.5;
  const auto k = gaussian_bound_kernel(HomogeneousNorm::euclidean(2), c1, c2);
  const double a = k.fourier_amplitude();
  for (double s : {1e-3, 0.1, 2.0}) {
    EXPECT_NEAR(spectral_part(k, white_noise_measure(2), s), a * a * c2 / (2.0 * pi * s), 1e-8 * a * a / s);
    EXPECT_TRUE(std::isfinite(I_of_s(k, white_noise_measure(2), s)));
  }
  EXPECT_EQ(dalang_integral(k.symbol(), white_noise_measure(2), 1.0).status, Verdict::divergent);
}

TEST(Upsilon, TwoRoutesOnClosedForm) {
  const auto u = upsilon(heat_kernel(1), unit_density(1), 2.0);
  EXPECT_NEAR(u.spectral_frequency, pi / 2.0, 1e-6);
  EXPECT_NEAR(u.spectral_time, pi / 2.0, 1e-6);
  EXPECT_NEAR(u.l1_frequency, 0.5, 1e-12);
  EXPECT_NEAR(u.value, pi / 2.0 + 0.5, 1e-6);
  EXPECT_LE(u.relative_discrepancy, kTonelliTolerance);
}

TEST(Upsilon, DecreasesToZero) {
  const auto k = heat_kernel(1);
  const auto m = white_noise_measure(1);
  const double u1 = upsilon_frequency(k, m, 1.0);
  EXPECT_LT(upsilon_frequency(k, m, 2.0), u1);
  double previous = u1;
  for (double beta : {10.0, 100.0, 1000.0}) {
    const double v = upsilon_frequency(k, m, beta);
    EXPECT_LT(v, previous);
    previous = v;
  }
  EXPECT_LT(upsilon_frequency(k, m, 1e8), 1e-4);
}

TEST(Upsilon, CurveMonotone) {
  std::vector<double> betas;
  for (double b = 1.0; b < 2e4; b *= 3.0) betas.push_back(b);
  for (const auto& m : {white_noise_measure(1), riesz_measure(1, 0.5)}) {
    const auto curve = upsilon_curve(heat_kernel(1), m, betas);
    ASSERT_EQ(curve.size(), betas.size());
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i], curve[i - 1]);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      EXPECT_NEAR(curve[i], upsilon_frequency(heat_kernel(1), m, betas[i]), 1e-5 * curve[i]);
    }
  }
}

TEST(Generalized, WaveWhiteNoiseLine) {
  // int sin^2(s r) / r^2 dr over R = pi s, so the condition equals (2 pi)^{-1} int_0^1 pi s ds = 1/4.
  const auto v = generalized_condition(wave_fourier_kernel(), white_noise_measure(1), 0.0, 1.0);
  ASSERT_TRUE(v.convergent());
  EXPECT_NEAR(v.value, 0.25, 1e-3);
}

TEST(Generalized, HeatInfiniteHorizonMatchesDalang) {
  auto ghat = [](double s, double r) { return std::exp(-s * r * r); };
  const auto g = generalized_condition(ghat, white_noise_measure(1), 2.0, std::numeric_limits<double>::infinity());
  const auto d = dalang_integral(heat_symbol(1), white_noise_measure(1), 2.0);
  ASSERT_TRUE(g.convergent());
  EXPECT_NEAR(g.value, d.value, 1e-4 * d.value);
}

TEST(Generalized, ConstantTransformDiverges) {
  auto ghat = [](double, double) { return 1.0; };
  EXPECT_EQ(generalized_condition(ghat, white_noise_measure(1), 0.0, 1.0).status, Verdict::divergent);
}

TEST(InitialBound, ConstantsPreserved) {
  EXPECT_NEAR(initial_condition_bound(heat_kernel(1), InitialData::constant(3.0), 1.0), 3.0, 1e-12);
  EXPECT_NEAR(initial_condition_bound(fractional_heat_kernel(1, 0.5, 1.0), InitialData::constant(1.0), 2.0),
              std::exp(2.0), 1e-9);
}

TEST(InitialBound, GridBumpBelowSupNorm) {
  const Grid grid(1, 32.0, 256, 1.0 / 64, 64);
  const auto u0 = InitialData::gaussian(2.0, 1.0);
  const double bound = initial_condition_bound(heat_kernel(1), u0, 1.0, grid);
  EXPECT_LE(bound, 2.0 * (1.0 + 1e-9));
  EXPECT_GT(bound, 1.9);
}

TEST(InitialBound, UnboundedLawRejected) {
  const auto base = heat_kernel(1);
  const DominatingKernel k(1, KernelFamily::heat, base.symbol(), 1.0, nullptr,
                           L1Law::from_function([](double s) { return 1.0 / s; }), false, "singular");
  EXPECT_THROW(initial_condition_bound(k, InitialData::constant(1.0), 1.0), IntegrabilityError);
}

TEST(Contraction, RateAtLargeBeta) {
  const auto r = contraction_rate(1.0, heat_kernel(1), unit_density(1), 200.0);
  EXPECT_NEAR(r.upsilon - 1.0 / 200.0, pi / 20.0, 1e-6);
  EXPECT_NEAR(r.ratio, r.iota * r.upsilon, 1e-15);
  EXPECT_GE(r.ratio, 0.0);
}

TEST(Contraction, RatioStrictlyDecreasing) {
  double previous = std::numeric_limits<double>::infinity();
  for (double beta = 0.5; beta < 1e4; beta *= 2.0) {
    const auto r = contraction_rate(1.5, heat_kernel(1), white_noise_measure(1), beta);
    EXPECT_LT(r.ratio, previous);
    previous = r.ratio;
  }
}

TEST(Contraction, BisectionContract) {
  const auto k = heat_kernel(1);
  const auto m = unit_density(1);
  const auto r = find_contraction_beta(1.0, k, m, 0.5);
  EXPECT_LE(r.ratio, 0.5);
  EXPECT_NEAR(contraction_rate(1.0, k, m, r.beta).ratio, r.ratio, 1e-9);
  EXPECT_GT(contraction_rate(1.0, k, m, 0.5 * r.beta).ratio, 0.5);
  EXPECT_GT(contraction_rate(1.0, k, m, r.beta * (1.0 - 1e-3)).ratio, 0.5 * (1.0 - 1e-3));
}

TEST(Contraction, ZeroIota) {
  const auto k = fractional_heat_kernel(1, 0.5, 1.0);
  const auto r = find_contraction_beta(0.0, k, white_noise_measure(1), 0.5);
  EXPECT_EQ(r.ratio, 0.0);
  // Admissible betas are strictly above the minimum.
  EXPECT_GT(r.beta, minimal_beta(k));
  EXPECT_NEAR(r.beta, minimal_beta(k), 1e-5);
  EXPECT_EQ(minimal_beta(k), 2.0);
}
