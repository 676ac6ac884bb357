#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "spde/quadrature.hpp"

using namespace spde;

namespace {

constexpr double pi = std::numbers::pi;

void expect_convergent_invariant(const HalfLineResult& r, double rel_tol) {
  ASSERT_EQ(r.status, Verdict::convergent);
  EXPECT_LE(r.tail_estimate, rel_tol * r.value);
  EXPECT_EQ(r.radii.size(), r.partials.size());
}

}  // namespace

TEST(Interval, MatchesSimpson) {
  auto f = [](double x) { return std::sin(3.0 * x) * std::exp(-x) + x * x; };
  EXPECT_NEAR(integrate_interval(f, 0.0, 4.0), oracle::simpson(f, 0.0, 4.0, 20000), 1e-10);
}

TEST(HalfLine, Exponential) {
  HalfLineIntegrand in{[](double x) { return std::exp(-x); }, 0.0, std::numeric_limits<double>::infinity()};
  const auto r = integrate_half_line(in);
  expect_convergent_invariant(r, 1e-6);
  EXPECT_NEAR(r.value, 1.0, 1e-6);
  HalfLineOptions opt;
  opt.rel_tol = 1e-10;
  const auto fine = integrate_half_line(in, opt);
  expect_convergent_invariant(fine, 1e-10);
  EXPECT_NEAR(fine.value, 1.0, 1e-9);
}

TEST(HalfLine, ExponentialOracle) {
  auto f = [](double x) { return x * x * std::exp(-0.5 * x); };
  HalfLineIntegrand in{f, 2.0, std::numeric_limits<double>::infinity()};
  const auto r = integrate_half_line(in);
  expect_convergent_invariant(r, 1e-6);
  EXPECT_NEAR(r.value, oracle::half_line(f), 1e-5 * r.value);
  EXPECT_NEAR(r.value, 16.0, 1e-5 * 16.0);
}

TEST(HalfLine, IntegrableOriginSingularity) {
  HalfLineIntegrand in{[](double x) { return std::exp(-x) / std::sqrt(x); }, -0.5,
                       std::numeric_limits<double>::infinity()};
  HalfLineOptions opt;
  opt.rel_tol = 1e-10;
  const auto r = integrate_half_line(in, opt);
  expect_convergent_invariant(r, 1e-10);
  EXPECT_NEAR(r.value, std::sqrt(pi), 1e-8);
}

TEST(HalfLine, AlgebraicTail) {
  HalfLineIntegrand in{[](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 2.0};
  HalfLineOptions opt;
  opt.rel_tol = 1e-8;
  const auto r = integrate_half_line(in, opt);
  expect_convergent_invariant(r, 1e-8);
  EXPECT_NEAR(r.value, 0.5 * pi, 1e-7);
  EXPECT_NEAR(r.value, oracle::half_line([](double x) { return 1.0 / (1.0 + x * x); }), 1e-7);
}

TEST(HalfLine, SlowTailWithoutDeclaration) {
  HalfLineIntegrand in{[](double x) { return 1.0 / std::pow(1.0 + x, 1.5); }, 0.0, std::nullopt};
  HalfLineOptions opt;
  opt.max_radius = 1e40;
  const auto r = integrate_half_line(in, opt);
  ASSERT_EQ(r.status, Verdict::convergent);
  EXPECT_NEAR(r.value, 2.0, 2e-5);
}

TEST(HalfLine, LogarithmicDivergence) {
  HalfLineIntegrand in{[](double x) { return 1.0 / (1.0 + x); }, 0.0, 1.0};
  HalfLineOptions opt;
  const auto r = integrate_half_line(in, opt);
  ASSERT_EQ(r.status, Verdict::divergent);
  // Partial values grow beyond the divergence factor over the last doublings.
  const std::size_t n = r.partials.size();
  ASSERT_GE(n, 4u);
  for (std::size_t i = n - 3; i < n; ++i) EXPECT_GE(r.partials[i], opt.divergence_factor * r.partials[i - 1]);
}

TEST(HalfLine, PowerDivergence) {
  HalfLineIntegrand in{[](double x) { return std::sqrt(x) / (1.0 + x); }, 0.5, 0.5};
  EXPECT_EQ(integrate_half_line(in).status, Verdict::divergent);
}

TEST(Geometry, SphereAndBall) {
  EXPECT_NEAR(unit_sphere_area(1), 2.0, 1e-15);
  EXPECT_NEAR(unit_sphere_area(2), 2.0 * pi, 1e-14);
  EXPECT_NEAR(unit_sphere_area(3), 4.0 * pi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * pi / 3.0, 1e-14);
  EXPECT_NEAR(unit_ball_volume(2), pi, 1e-14);
}
