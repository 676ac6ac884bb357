#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spde/covariance.hpp"
#include "spde/fft.hpp"
#include "spde/grid.hpp"
#include "spde/initial_data.hpp"
#include "spde/noise.hpp"
#include "spde/symbols.hpp"
#include "spde/wellposedness.hpp"

namespace spde {

/// Time-homogeneous nonlinearity u -> b(u) from a fixed expression set.
struct Coefficient {
  enum class Kind { zero, constant, linear, sine, tanh };

  Kind kind = Kind::zero;
  /// linear: a u + c; sine: a sin(omega u) + c; tanh: a tanh(omega u) + c.
  double a = 0.0;
  double c = 0.0;
  double omega = 1.0;
  /// Declared Lipschitz constant; defaults to the exact one.
  std::optional<double> declared_lipschitz;

  static Coefficient zero();
  static Coefficient constant(double value);
  static Coefficient linear(double slope, double offset = 0.0);
  static Coefficient sine(double amplitude, double frequency, double offset = 0.0);
  static Coefficient tanh(double amplitude, double frequency, double offset = 0.0);

  double operator()(double u) const;
  double lipschitz() const;
  bool is_zero() const;
  /// True when the value does not depend on u.
  bool is_constant() const;
  std::string describe() const;
};

Coefficient::Kind coefficient_kind_from_string(const std::string& name);
std::string to_string(Coefficient::Kind kind);

/// Largest |f(x) - f(y)| / |x - y| over 1000 pseudo-random pairs in [-range, range].
double sampled_lipschitz(const Coefficient& f, std::uint64_t seed, double range = 10.0);

/// Throws PreconditionError when the sampled ratio exceeds the declared constant.
void validate_lipschitz(const Coefficient& f, const std::string& name, std::uint64_t seed);

struct Problem {
  DominatingKernel kernel;
  SpectralMeasure measure;
  Coefficient b;
  Coefficient sigma;
  InitialData u0;
  Grid grid;
  double p = 2.0;
  std::size_t replicas = 100;
  std::uint64_t seed = 0;
  ZeroMode zero_mode = ZeroMode::cell_average;
};

/// Spectral multiplication of a real field by A e^{-t f(xi_k)}; t = 0 returns
/// the field unchanged.
std::vector<double> semigroup_apply(const DominatingKernel& kernel, double t, std::span<const double> field,
                                    const Grid& grid);

/// Precomputed propagators for one problem, shared read-only by all replicas.
class PicardScheme {
 public:
  explicit PicardScheme(const Problem& problem);

  const Grid& grid() const { return grid_; }
  const RealFft& fft() const { return fft_; }
  /// u_0(t_j, .) for j = 0..J, stored step-major.
  const std::vector<double>& initial_iterate() const { return initial_; }

  /// One Picard map: u_next(t_j) = P_j u0 + sum_{i<j} [dt P_{j-i} b(u(t_i)) + P_{j-1-i} (sigma(u(t_i)) dW_i)].
  /// `u` and `out` hold (J + 1) * size values; `noise` holds J * size values
  /// (ignored when sigma is zero). Throws NumericalBreakdown with `iterate`
  /// on non-finite output.
  void step(std::span<const double> u, std::span<const double> noise, std::span<double> out,
            int iterate) const;

 private:
  Grid grid_;
  Coefficient b_;
  Coefficient sigma_;
  RealFft fft_;
  /// propagator_[lag * spectral + k] = A e^{-lag dt f(xi_k)}, with lag 0 the identity.
  std::vector<double> propagator_;
  std::vector<Complex> u0_hat_;
  std::vector<double> u0_samples_;
  std::vector<double> initial_;
};

enum class SolveStatus { converged, max_iterations, non_contraction, refused };
std::string to_string(SolveStatus s);

struct SolveOptions {
  int n_max = 8;
  double tol = 1e-6;
  bool force = false;
  /// Weight in H_n; found by find_contraction_beta(iota, 1/2) when empty.
  std::optional<double> beta;
  /// Aggregate constant of the contraction bound; default_iota(problem) when empty.
  std::optional<double> iota;
  /// Average |u_{n+1} - u_n|^p over sites when u0 is constant, where every
  /// site has the same law; the maximum of per-site estimates is biased upward.
  bool pool_sites = true;
  unsigned workers = 0;
  std::size_t memory_budget_bytes = std::size_t{512} << 20;
  int bootstrap_resamples = 200;
  /// Keep per-replica hashes of the consumed noise for each iterate.
  bool record_noise_hashes = true;
};

struct RatioEstimate {
  int n = 0;
  double ratio = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool reliable = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::refused;
  std::string message;
  ConditionVerdict dalang;
  ConditionVerdict deterministic;
  double beta = 0.0;
  double iota = 0.0;
  double upsilon = 0.0;
  /// iota * Upsilon(beta).
  double rate_bound = 0.0;
  /// H_n used site-pooled moments.
  bool pooled = false;
  std::size_t replicas = 0;
  std::size_t blocks = 0;
  int iterates = 0;
  /// First n with sup_j H_n(t_j) <= tol, or -1.
  int stop_iterate = -1;
  /// H[n][j] = sup_x (E|u_{n+1} - u_n|^p)^{1/p}(t_j) e^{-beta t_j}.
  std::vector<std::vector<double>> H;
  std::vector<double> sup_H;
  /// ratios[k] compares sup H_{k+1} with sup H_k.
  std::vector<RatioEstimate> ratios;
  /// mean[n][m] and second_moment[n][m] of u_n(T, x_m) across replicas, n = 0..iterates.
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> second_moment;
  /// noise_hashes[r][n]: FNV-1a of the increments consumed by iterate n of replica r.
  std::vector<std::vector<std::uint64_t>> noise_hashes;

  /// Index of the iterate reported as the solution.
  int solution_iterate() const { return stop_iterate >= 0 ? stop_iterate + 1 : iterates; }
};

/// 2^(1 - 1/p) (L_b + L_sigma).
double default_iota(const Problem& problem);

/// Checks the integrability conditions, then runs the Picard iteration over
/// all replicas and evaluates the H_n diagnostics. Refuses (status refused,
/// no replica run) when a condition is not convergent unless options.force.

SolveResult solve(const Problem& problem, const SolveOptions& options = {});

/// Exit code reported for a solver status.
int exit_code(SolveStatus s);

}  // namespace spde
