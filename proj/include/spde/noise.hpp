#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spde/covariance.hpp"
#include "spde/fft.hpp"
#include "spde/grid.hpp"
#include "spde/rng.hpp"

namespace spde {

/// Treatment of the zero frequency, where rho may be singular.
enum class ZeroMode { cell_average, zero };

std::string to_string(ZeroMode z);
ZeroMode zero_mode_from_string(const std::string& name);

/// rho(xi_k) (2 pi / L)^d on the half spectrum. The zero mode carries the
/// integral of rho over the fundamental frequency cell (or 0). Throws
/// PreconditionError when rho is not finite at a nonzero grid frequency.
std::vector<double> spectral_weights(const Grid& grid, const SpectralMeasure& measure,
                                     ZeroMode zero_mode = ZeroMode::cell_average);

/// Space-time Gaussian noise increments on the periodic grid, white in time
/// and correlated in space with spectral density rho.
///
/// The increment of step i in replica r is a pure function of (seed, r, i):
/// an iid N(0,1) site field drawn from Philox, transformed, scaled by
/// sqrt(N^d dt w_k) per mode and transformed back. Its covariance is
/// E[dW_i(x) dW_j(y)] = delta_ij dt sum_k w_k cos(xi_k . (x - y)).
class NoiseSampler {
 public:
  NoiseSampler(const Grid& grid, const SpectralMeasure& measure, std::uint64_t seed,
               ZeroMode zero_mode = ZeroMode::cell_average);

  const Grid& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }
  ZeroMode zero_mode() const { return zero_mode_; }
  const std::vector<double>& weights() const { return weights_; }

  void sample(std::size_t replica, std::size_t step, std::span<double> out) const;
  std::vector<double> sample(std::size_t replica, std::size_t step) const;
  /// Spectral synthesis starting from a caller-provided iid N(0,1) field.
  void colour(std::span<const double> white, std::span<double> out) const;

  /// Exact discrete covariance between sites separated by `lag` grid steps along axis 0.
  double covariance(long lag) const;
  double site_variance() const { return covariance(0); }

 private:
  Grid grid_;
  std::uint64_t seed_;
  ZeroMode zero_mode_;
  std::vector<double> weights_;
  std::vector<double> amplitude_;
  Philox rng_;
  RealFft fft_;
};

/// Fills `out` with iid N(0,1) values for (replica, step) under `tag`.
void standard_normal_field(const Philox& rng, std::size_t replica, std::size_t step, StreamTag tag,
                           std::span<double> out);

/// Space-time field X(t_i, x_m) stored step-major: steps * grid.size() values.
using SpaceTimeField = std::vector<double>;

/// sum_i dt sum_k |X^_i(xi_k)|^2 w_k with X^ = dx^d * DFT, summed over the full
/// frequency lattice. The deterministic variance of the discrete stochastic
/// integral sum_i sum_m X(t_i, x_m) dW_i(x_m) dx^d.
double discrete_h_norm(const SpaceTimeField& x, const SpectralMeasure& measure, const Grid& grid,
                       ZeroMode zero_mode = ZeroMode::cell_average);

struct IsometryReport {
  std::size_t replicas = 0;
  double empirical = 0.0;
  double exact = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
};

/// Monte Carlo second moment of the discrete stochastic integral of X against
/// the synthesized noise, compared with discrete_h_norm.
IsometryReport isometry_check(const SpaceTimeField& x, const SpectralMeasure& measure, const Grid& grid,
                              std::size_t replicas, std::uint64_t seed,
                              ZeroMode zero_mode = ZeroMode::cell_average, unsigned workers = 0);

struct NoiseValidation {
  std::size_t replicas = 0;
  double site_variance = 0.0;
  double empirical_variance = 0.0;
  double variance_z = 0.0;
  double cross_cov_z = 0.0;
  /// Largest |z| over translated site pairs at a common lag.
  double stationarity_max_dev = 0.0;
  long stationarity_lag = 0;
  bool passed(double bound = 3.0) const;
};

/// Per-site variance, cross-step covariance and stationarity statistics of
/// steps 0 and 1 over `replicas` independent replicas, each as a z-score
/// against the exact discrete covariance.
NoiseValidation validate_noise(const NoiseSampler& sampler, std::size_t replicas, unsigned workers = 0);

}  // namespace spde
