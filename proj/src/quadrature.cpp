#include "spde/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "spde/errors.hpp"

namespace spde {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::convergent:
      return "convergent";
    case Verdict::divergent:
      return "divergent";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, static_cast<unsigned>(max_depth), rel_tol, &error);
  return value;
}

double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

HalfLineResult integrate_half_line(const HalfLineIntegrand& integrand,
                                   const HalfLineOptions& options) {
  require(integrand.origin_exponent > -1.0, "integrand is not integrable at the origin");
  require(options.inner_radius > 0.0, "inner radius must be positive");

  HalfLineResult result;
  const auto& f = integrand.f;
  const double r0 = options.inner_radius;
  const double kappa = integrand.origin_exponent;

  double partial;
  if (kappa < 0.0) {
    // x = r0 v^m with m (kappa + 1) = 1 turns x^kappa dx into a constant density.
    const double m = 1.0 / (kappa + 1.0);
    auto g = [&](double v) {
      if (v <= 0.0) v = std::numeric_limits<double>::min();
      return f(r0 * std::pow(v, m)) * r0 * m * std::pow(v, m - 1.0);
    };
    partial = integrate_interval(g, 0.0, 1.0, options.piece_tol, options.max_depth);
  } else {
    partial = integrate_interval(f, 0.0, r0, options.piece_tol, options.max_depth);
  }
  result.radii.push_back(r0);
  result.partials.push_back(partial);

  const bool declared = integrand.tail_decay.has_value();
  const double q = declared ? *integrand.tail_decay : 0.0;
  const bool declared_nonsummable = declared && q <= 1.0;
  double declared_factor = 0.0;
  if (declared && std::isfinite(q) && q > 1.0) {
    const double rho = std::pow(2.0, 1.0 - q);
    declared_factor = rho / (1.0 - rho);
  }

  double radius = r0;
  double previous_annulus = std::numeric_limits<double>::quiet_NaN();
  int nonsummable_run = 0;
  int annuli = 0;

  while (2.0 * radius <= options.max_radius) {
    const double annulus =
        integrate_interval(f, radius, 2.0 * radius, options.piece_tol, options.max_depth);
    if (!std::isfinite(annulus)) break;
    const double previous_partial = partial;
    partial += annulus;
    radius *= 2.0;
    ++annuli;
    result.radii.push_back(radius);
    result.partials.push_back(partial);

    double ratio = std::numeric_limits<double>::infinity();
    if (annulus == 0.0 && (annuli == 1 || previous_annulus == 0.0)) {
      ratio = 0.0;
    } else if (annuli > 1 && previous_annulus > 0.0) {
      ratio = annulus / previous_annulus;
    }
    previous_annulus = annulus;

    const double growth = previous_partial > 0.0 ? partial / previous_partial
                                                 : std::numeric_limits<double>::infinity();
    if (growth >= options.divergence_factor && ratio >= options.nonsummable_ratio) {
      ++nonsummable_run;
    } else {
      nonsummable_run = 0;
    }

    if (radius < options.asymptotic_radius || annuli < 2) continue;

    double tail = std::numeric_limits<double>::infinity();
    if (ratio == 0.0) {
      tail = 0.0;
    } else if (ratio < 1.0) {
      tail = annulus * ratio / (1.0 - ratio);
      if (declared_factor > 0.0) tail = std::max(tail, annulus * declared_factor);
    }

    if (!declared_nonsummable && std::isfinite(tail) &&
        tail <= options.rel_tol * std::abs(partial + tail)) {
      result.status = Verdict::convergent;
      result.partial = partial;
      result.tail_estimate = tail;
      result.value = partial + tail;
      return result;
    }
    if (nonsummable_run >= options.divergence_doublings && (!declared || declared_nonsummable)) {
      result.status = Verdict::divergent;
      result.partial = partial;
      result.tail_estimate = std::numeric_limits<double>::infinity();
      result.value = partial;
      return result;
    }
  }

  result.status = Verdict::inconclusive;
  result.partial = partial;
  result.tail_estimate = std::numeric_limits<double>::infinity();
  result.value = partial;
  return result;
}

}  // namespace spde
