#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace spde {

enum class Verdict { convergent, divergent, inconclusive };

std::string to_string(Verdict v);

/// Integrand on (0, inf) together with the asymptotic metadata that drives the
/// integration protocol.
struct HalfLineIntegrand {
  std::function<double(double)> f;
  /// f(x) ~ x^kappa as x -> 0, kappa > -1. Negative values trigger a power
  /// substitution on the inner interval that removes the singularity.
  double origin_exponent = 0.0;
  /// Declared envelope f(x) = O(x^{-q}) as x -> inf; +inf for super-polynomial
  /// decay; nullopt when unknown (only measured annulus ratios are used).
  std::optional<double> tail_decay;
};

struct HalfLineOptions {
  double rel_tol = 1e-6;
  /// Partial sums must grow by at least this factor per doubling to count
  /// towards a divergence verdict.
  double divergence_factor = 1.05;
  int divergence_doublings = 3;
  /// Annulus-to-annulus ratio at or above which contributions are treated as
  /// non-summable.
  double nonsummable_ratio = 0.95;
  double inner_radius = 1.0;
  /// No verdict is issued before the outer radius reaches this value.
  double asymptotic_radius = 0.0;
  double max_radius = 1e140;
  /// Relative tolerance of the adaptive rule inside each piece.
  double piece_tol = 1e-11;
  int max_depth = 15;
};

struct HalfLineResult {
  Verdict status = Verdict::inconclusive;
  /// Partial integral plus the tail estimate.
  double value = 0.0;
  double partial = 0.0;
  double tail_estimate = 0.0;
  /// Outer radius and partial integral after the inner piece and each doubling.
  std::vector<double> radii;
  std::vector<double> partials;
};

/// Integrates f over (0, inf): an inner piece [0, R0], then annuli
/// [R, 2R] until the estimated remainder falls below rel_tol of the total
/// (convergent) or the partial sums keep growing with a non-summable annulus
/// envelope over the configured number of doublings (divergent).
HalfLineResult integrate_half_line(const HalfLineIntegrand& integrand,
                                   const HalfLineOptions& options = {});

/// Adaptive Gauss-Kronrod on a finite interval.
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-11, int max_depth = 15);

/// Surface area of the unit sphere in R^d.
double unit_sphere_area(int d);
/// Volume of the unit Euclidean ball in R^d.
double unit_ball_volume(int d);

}  // namespace spde
