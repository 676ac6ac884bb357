#include "spde/covariance.hpp"

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <numbers>
#include <sstream>

#include "spde/errors.hpp"
#include "spde/quadrature.hpp"

namespace spde {

std::string to_string(CovarianceFamily f) {
  switch (f) {
    case CovarianceFamily::riesz:
      return "riesz";
    case CovarianceFamily::white:
      return "white";
    case CovarianceFamily::sobolev:
      return "sobolev";
    case CovarianceFamily::custom:
      return "custom";
  }
  return "unknown";
}

SpectralMeasure::SpectralMeasure(int dim, Profile profile, double origin_exponent,
                                 double tail_exponent, CovarianceFamily family,
                                 std::string description)
    : dim_(dim),
      profile_(std::move(profile)),
      origin_exponent_(origin_exponent),
      tail_exponent_(tail_exponent),
      family_(family),
      description_(std::move(description)) {
  require(dim >= 1 && dim <= 3, "spectral measures are supported for d = 1, 2, 3");
  require(origin_exponent < dim, "spectral density is not locally integrable at the origin");
}

SpectralMeasure::SpectralMeasure(int dim, Density density, double origin_exponent,
                                 double tail_exponent, CovarianceFamily family,
                                 std::string description)
    : dim_(dim),
      density_(std::move(density)),
      origin_exponent_(origin_exponent),
      tail_exponent_(tail_exponent),
      family_(family),
      description_(std::move(description)) {
  require(dim >= 1 && dim <= 3, "spectral measures are supported for d = 1, 2, 3");
  require(origin_exponent < dim, "spectral density is not locally integrable at the origin");
}

double SpectralMeasure::density(std::span<const double> xi) const {
  require(static_cast<int>(xi.size()) == dim_, "frequency has the wrong dimension");
  if (profile_) {
    // hypot avoids underflow of tiny radii to 0, where singular profiles blow up.
    double r = 0.0;
    for (double v : xi) r = std::hypot(r, v);
    return profile_(r);
  }
  return density_(xi);
}

double SpectralMeasure::shell_density(double r) const {
  if (profile_) return unit_sphere_area(dim_) * std::pow(r, dim_ - 1) * profile_(r);
  switch (dim_) {
    case 1: {
      const std::array<double, 1> plus{r};
      const std::array<double, 1> minus{-r};
      return density_(plus) + density_(minus);
    }
    case 2: {
      constexpr int n = 128;
      double sum = 0.0;
      for (int j = 0; j < n; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / n;
        const std::array<double, 2> xi{r * std::cos(theta), r * std::sin(theta)};
        sum += density_(xi);
      }
      return r * sum * 2.0 * std::numbers::pi / n;
    }
    default: {
      using rule = boost::math::quadrature::gauss<double, 32>;
      constexpr int nphi = 64;
      double sum = 0.0;
      const auto& nodes = rule::abscissa();
      const auto& weights = rule::weights();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (double sign : {1.0, -1.0}) {
          if (sign < 0.0 && nodes[i] == 0.0) continue;
          const double c = sign * nodes[i];
          const double s = std::sqrt(1.0 - c * c);
          for (int j = 0; j < nphi; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / nphi;
            const std::array<double, 3> xi{r * s * std::cos(phi), r * s * std::sin(phi), r * c};
            sum += weights[i] * density_(xi) * 2.0 * std::numbers::pi / nphi;
          }
        }
      }
      return r * r * sum;
    }
  }
}

// ---------------------------------------------------------------------------

SpectralMeasure riesz_measure(int dim, double lambda) {
  require(dim >= 1, "dimension must be positive");
  if (!(lambda > 0.0 && lambda < dim)) {
    std::ostringstream os;
    os << "Riesz exponent lambda=" << lambda << " must lie in (0, d) with d=" << dim;
    throw PreconditionError(os.str());
  }
  std::ostringstream desc;
  desc << "riesz(d=" << dim << ", lambda=" << lambda << ")";
  const double p = lambda - dim;
  return SpectralMeasure(
      dim, [p](double r) { return std::pow(r, p); }, dim - lambda, dim - lambda,
      CovarianceFamily::riesz, desc.str());
}

SpectralMeasure white_noise_measure(int dim) {
  require(dim >= 1, "dimension must be positive");
  const double level = std::pow(2.0 * std::numbers::pi, -dim);
  return SpectralMeasure(
      dim, [level](double) { return level; }, 0.0, 0.0, CovarianceFamily::white,
      "white(d=" + std::to_string(dim) + ")");
}

SpectralMeasure sobolev_bound_measure(int dim, double order, double constant) {
  require(order >= 0.0, "Sobolev order k must be non-negative");
  require(constant > 0.0, "Sobolev constant C must be positive");
  std::ostringstream desc;
  desc << "sobolev(d=" << dim << ", k=" << order << ", C=" << constant << ")";
  return SpectralMeasure(
      dim, [order, constant](double r) { return constant * std::pow(1.0 + r, -order); }, 0.0, order,
      CovarianceFamily::sobolev, desc.str());
}

// ---------------------------------------------------------------------------

namespace {

// Mean of the density over the sphere of radius r.
double spherical_mean(const SpectralMeasure& m, double r) {
  return m.shell_density(r) / (unit_sphere_area(m.dim()) * std::pow(r, m.dim() - 1));
}

// Beyond this measured decay per decade an infinite tail exponent is accepted.
constexpr double kSuperPolynomialDecades = 8.0;

void validate_custom(const SpectralMeasure& m) {
  for (int e = -40; e <= 40; ++e) {
    const double r = std::pow(10.0, 0.1 * e);
    const double v = spherical_mean(m, r);
    if (!(v >= 0.0) || std::isinf(v)) {
      std::ostringstream os;
      os << "custom density '" << m.description() << "' is negative or not finite at |xi|=" << r
         << " (value " << v << ")";
      throw PreconditionError(os.str());
    }
  }
  const double a = m.origin_exponent();
  const double near = spherical_mean(m, 1e-2);
  const double nearer = spherical_mean(m, 1e-3);
  if (near > 0.0 && nearer > 10.0 * near * std::pow(10.0, a)) {
    std::ostringstream os;
    os << "custom density '" << m.description() << "': measured origin exponent "
       << std::log10(nearer / near) << " exceeds declared " << a;
    throw PreconditionError(os.str());
  }
  if (!m.exponents_declared()) return;
  const double b = m.tail_exponent();
  const double far = spherical_mean(m, 1e2);
  const double farther = spherical_mean(m, 1e3);
  const double envelope = std::isinf(b) ? std::pow(10.0, -kSuperPolynomialDecades) : std::pow(10.0, -b);
  if (far > 0.0 && farther > 10.0 * far * envelope) {
    std::ostringstream os;
    os << "custom density '" << m.description() << "': measured tail exponent "
       << (farther > 0.0 ? std::log10(far / farther) : std::numeric_limits<double>::infinity())
       << " is below declared " << b;
    throw PreconditionError(os.str());
  }
}

}  // namespace

SpectralMeasure custom_measure(int dim, SpectralMeasure::Profile profile, const CustomMeasureSpec& spec) {
  SpectralMeasure m(dim, std::move(profile), spec.origin_exponent, spec.tail_exponent,
                    CovarianceFamily::custom, spec.description);
  validate_custom(m);
  return m;
}

SpectralMeasure custom_measure(int dim, SpectralMeasure::Density density, const CustomMeasureSpec& spec) {
  SpectralMeasure m(dim, std::move(density), spec.origin_exponent, spec.tail_exponent,
                    CovarianceFamily::custom, spec.description);
  validate_custom(m);
  return m;
}

SpectralMeasure expression_measure(int dim, const std::string& expression, double amplitude,
                                   double scale, double exponent, std::optional<double> origin_exponent,
                                   std::optional<double> tail_exponent) {
  const double inf = std::numeric_limits<double>::infinity();
  CustomMeasureSpec spec;
  std::ostringstream desc;
  SpectralMeasure::Profile profile;
  if (expression == "power") {
    desc << "power(A=" << amplitude << ", p=" << exponent << ")";
    profile = [amplitude, exponent](double r) { return amplitude * std::pow(r, -exponent); };
    spec.origin_exponent = std::max(0.0, exponent);
    spec.tail_exponent = exponent;
  } else if (expression == "gaussian") {
    require(scale > 0.0, "gaussian density needs a positive scale");
    desc << "gaussian(A=" << amplitude << ", scale=" << scale << ")";
    profile = [amplitude, scale](double r) { return amplitude * std::exp(-(r / scale) * (r / scale)); };
    spec.tail_exponent = inf;
  } else if (expression == "exponential") {
    require(scale > 0.0, "exponential density needs a positive scale");
    desc << "exponential(A=" << amplitude << ", scale=" << scale << ")";
    profile = [amplitude, scale](double r) { return amplitude * std::exp(-r / scale); };
    spec.tail_exponent = inf;
  } else if (expression == "rational") {
    desc << "rational(A=" << amplitude << ", k=" << exponent << ")";
    profile = [amplitude, exponent](double r) { return amplitude * std::pow(1.0 + r * r, -0.5 * exponent); };
    spec.tail_exponent = exponent;
  } else if (expression == "zero") {
    desc << "zero";
    profile = [](double) { return 0.0; };
    spec.tail_exponent = inf;
  } else {
    throw PreconditionError("unknown custom density expression '" + expression + "'");
  }
  if (origin_exponent) spec.origin_exponent = *origin_exponent;
  if (tail_exponent) spec.tail_exponent = *tail_exponent;
  spec.description = desc.str();
  return custom_measure(dim, std::move(profile), spec);
}

}  // namespace spde
