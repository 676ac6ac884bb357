#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "spde/covariance.hpp"
#include "spde/errors.hpp"
#include "spde/quadrature.hpp"
#include "spde/symbols.hpp"
#include "spde/wellposedness.hpp"

using namespace spde;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Riesz, DensityFormula) {
  const auto m = riesz_measure(2, 1.0);
  const std::array<double, 2> xi = {2.0, 0.0};
  EXPECT_NEAR(m.density(xi), 0.5, 1e-15);
  EXPECT_EQ(m.family(), CovarianceFamily::riesz);
}

TEST(Riesz, OriginExponentBelowDimension) {
  const auto m = riesz_measure(1, 0.5);
  EXPECT_DOUBLE_EQ(m.origin_exponent(), 0.5);
  EXPECT_LT(m.origin_exponent(), 1.0);
}

TEST(Riesz, BoundaryExcluded) {
  EXPECT_THROW(riesz_measure(3, 3.0), PreconditionError);
  EXPECT_THROW(riesz_measure(2, 0.0), PreconditionError);
  EXPECT_THROW(riesz_measure(2, 2.0), PreconditionError);
}

TEST(WhiteNoise, FlatDensity) {
  const auto m1 = white_noise_measure(1);
  for (double x : {-3.0, 0.0, 0.25, 100.0}) {
    const std::array<double, 1> xi = {x};
    EXPECT_NEAR(m1.density(xi), 1.0 / (2.0 * pi), 1e-16);
  }
  const auto m2 = white_noise_measure(2);
  const std::array<double, 2> a = {0.1, 0.2};
  const std::array<double, 2> b = {-7.0, 30.0};
  EXPECT_EQ(m2.density(a), m2.density(b));
  EXPECT_EQ(m2.origin_exponent(), 0.0);
}

TEST(WhiteNoise, ParsevalNormalisation) {
  // int e^{i xi x} rho(xi) dxi against a Gaussian test function phi recovers phi(0):
  // int phi^(xi) rho dxi = (2 pi)^{-1} int sqrt(pi) e^{-xi^2 / 4} dxi = 1 = phi(0) for phi = e^{-x^2}.
  const auto m = white_noise_measure(1);
  const double value = 2.0 * integrate_interval(
                                 [&](double r) {
                                   const std::array<double, 1> xi = {r};
                                   return std::sqrt(pi) * std::exp(-r * r / 4.0) * m.density(xi);
                                 },
                                 0.0, 60.0);
  EXPECT_NEAR(value, 1.0, 1e-12);
}

TEST(Sobolev, DensityAndExponents) {
  const auto m = sobolev_bound_measure(3, 2.0, 1.5);
  const std::array<double, 3> xi = {0.0, 1.0, 0.0};
  EXPECT_NEAR(m.density(xi), 1.5 / 4.0, 1e-15);
  EXPECT_EQ(m.tail_exponent(), 2.0);
  const auto flat = sobolev_bound_measure(2, 0.0, 0.7);
  const std::array<double, 2> far = {50.0, -3.0};
  EXPECT_NEAR(flat.density(far), 0.7, 1e-15);
}

TEST(SpectralMeasure, ShellDensityIsSphereIntegral) {
  const auto m = riesz_measure(3, 1.2);
  const double r = 1.7;
  EXPECT_NEAR(m.shell_density(r), 4.0 * pi * r * r * std::pow(r, 1.2 - 3.0), 1e-12);
}

TEST(SpectralMeasure, NonNegativeCatalogue) {
  const std::array<SpectralMeasure, 4> all = {riesz_measure(2, 0.5), white_noise_measure(2),
                                              sobolev_bound_measure(2, 1.0, 1.0),
                                              expression_measure(2, "rational", 2.0, 1.0, 3.0, {}, {})};
  for (const auto& m : all) {
    for (double x = 0.01; x < 100.0; x *= 1.3) {
      const std::array<double, 2> xi = {x, -0.5 * x};
      EXPECT_GE(m.density(xi), 0.0);
    }
    EXPECT_LT(m.origin_exponent(), m.dim());
  }
}

TEST(CustomMeasure, GaussianAcceptedWithInfiniteTail) {
  CustomMeasureSpec spec;
  spec.tail_exponent = std::numeric_limits<double>::infinity();
  const auto m = custom_measure(1, [](double r) { return std::exp(-r * r); }, spec);
  EXPECT_TRUE(std::isinf(m.tail_exponent()));
  EXPECT_TRUE(m.exponents_declared());
}

TEST(CustomMeasure, NegativeDensityRejected) {
  CustomMeasureSpec spec;
  spec.tail_exponent = std::numeric_limits<double>::infinity();
  EXPECT_THROW(custom_measure(1, [](double r) { return std::cos(r) * std::exp(-r); }, spec), PreconditionError);
}

TEST(CustomMeasure, WrongTailDeclarationRejected) {
  CustomMeasureSpec spec;
  spec.tail_exponent = 4.0;
  EXPECT_THROW(custom_measure(1, [](double r) { return 1.0 / (1.0 + r); }, spec), PreconditionError);
}

TEST(CustomMeasure, UndeclaredTailIsInconclusive) {
  const auto m = custom_measure(1, [](double r) { return 1.0 / (1.0 + r * r); }, CustomMeasureSpec{});
  EXPECT_FALSE(m.exponents_declared());
  const auto v = dalang_integral(heat_symbol(1), m, 1.0);
  EXPECT_EQ(v.status, Verdict::inconclusive);
}

TEST(CustomMeasure, RieszAsCustomAgrees) {
  for (int d : {1, 2, 3}) {
    for (double lambda : {0.5, 1.0, 1.9, 2.5}) {
      if (lambda >= d) continue;
      const auto builtin = riesz_measure(d, lambda);
      CustomMeasureSpec spec;
      spec.origin_exponent = d - lambda;
      spec.tail_exponent = d - lambda;
      const auto custom = custom_measure(d, [d, lambda](double r) { return std::pow(r, lambda - d); }, spec);
      const auto a = dalang_integral(heat_symbol(d), builtin, 2.0);
      const auto b = dalang_integral(heat_symbol(d), custom, 2.0);
      EXPECT_EQ(a.status, b.status) << "d=" << d << " lambda=" << lambda;
      if (a.convergent()) {
        EXPECT_NEAR(a.value, b.value, 1e-9 * a.value);
      }
    }
  }
}

TEST(ExpressionMeasure, Table) {
  const std::array<double, 1> xi = {2.0};
  EXPECT_NEAR(expression_measure(1, "power", 3.0, 1.0, 0.5, {}, {}).density(xi), 3.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(expression_measure(1, "gaussian", 1.0, 2.0, 0.0, {}, {}).density(xi), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(expression_measure(1, "exponential", 2.0, 0.5, 0.0, {}, {}).density(xi), 2.0 * std::exp(-4.0), 1e-15);
  EXPECT_NEAR(expression_measure(1, "rational", 1.0, 1.0, 2.0, {}, {}).density(xi), 0.2, 1e-15);
  EXPECT_EQ(expression_measure(1, "zero", 1.0, 1.0, 0.0, {}, {}).density(xi), 0.0);
}
