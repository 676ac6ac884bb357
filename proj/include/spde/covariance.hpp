#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>

namespace spde {

enum class CovarianceFamily { riesz, white, sobolev, custom };

std::string to_string(CovarianceFamily f);

/// Absolutely continuous spectral measure rho(xi) dxi of the noise covariance.
///
/// The Fourier convention is Ff(xi) = int e^{-i xi.x} f(x) dx, so the covariance
/// is gamma(x) = int e^{i xi.x} rho(xi) dxi and white noise has the flat
/// density (2 pi)^{-d}.
///
/// origin_exponent a: rho ~ |xi|^{-a} at 0 (0 when bounded).
/// tail_exponent b: rho = O(|xi|^{-b}) at infinity; +inf for super-polynomial
/// decay; NaN when undeclared.
class SpectralMeasure {
 public:
  using Density = std::function<double(std::span<const double>)>;
  using Profile = std::function<double(double)>;

  /// Radial measure.
  SpectralMeasure(int dim, Profile profile, double origin_exponent, double tail_exponent,
                  CovarianceFamily family, std::string description);
  /// General measure with density given on R^d (d <= 3).
  SpectralMeasure(int dim, Density density, double origin_exponent, double tail_exponent,
                  CovarianceFamily family, std::string description);

  int dim() const { return dim_; }
  double origin_exponent() const { return origin_exponent_; }
  double tail_exponent() const { return tail_exponent_; }
  bool exponents_declared() const { return !std::isnan(tail_exponent_); }
  CovarianceFamily family() const { return family_; }
  const std::string& description() const { return description_; }
  bool is_radial() const { return static_cast<bool>(profile_); }

  double density(std::span<const double> xi) const;
  /// int_{|xi| = r} rho dS, i.e. the radial density of the measure.
  double shell_density(double r) const;

 private:
  int dim_;
  Profile profile_;
  Density density_;
  double origin_exponent_;
  double tail_exponent_;
  CovarianceFamily family_;
  std::string description_;
};

SpectralMeasure riesz_measure(int dim, double lambda);
SpectralMeasure white_noise_measure(int dim);
SpectralMeasure sobolev_bound_measure(int dim, double order, double constant);

/// Declared exponents of a user-supplied density.
struct CustomMeasureSpec {
  std::string description = "custom";
  double origin_exponent = 0.0;
  /// +inf for faster than any power, NaN when not declared.
  double tail_exponent = std::numeric_limits<double>::quiet_NaN();
};

/// Validates a user density by sampling: non-negativity on a radial sweep and
/// consistency of the declared exponents with the measured decay over the
/// decade below |xi| = 10^3 (and above |xi| = 10^-3), within a factor 10.
SpectralMeasure custom_measure(int dim, SpectralMeasure::Profile profile, const CustomMeasureSpec& spec);
SpectralMeasure custom_measure(int dim, SpectralMeasure::Density density, const CustomMeasureSpec& spec);

/// Built-in expression table for custom densities.
/// power:       amplitude * r^{-exponent}
/// gaussian:    amplitude * exp(-(r/scale)^2)
/// exponential: amplitude * exp(-r/scale)
/// rational:    amplitude * (1 + r^2)^{-exponent/2}
/// zero:        0
SpectralMeasure expression_measure(int dim, const std::string& expression, double amplitude,
                                   double scale, double exponent, std::optional<double> origin_exponent,
                                   std::optional<double> tail_exponent);

}  // namespace spde
