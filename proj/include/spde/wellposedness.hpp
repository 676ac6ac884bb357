#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spde/covariance.hpp"
#include "spde/initial_data.hpp"
#include "spde/quadrature.hpp"
#include "spde/symbols.hpp"

namespace spde {

/// Outcome of a numerical integrability check.
struct ConditionVerdict {
  Verdict status = Verdict::inconclusive;
  /// Finite estimate when convergent (partial integral plus tail estimate).
  double value = std::numeric_limits<double>::quiet_NaN();
  double beta = 0.0;
  double tail_estimate = std::numeric_limits<double>::infinity();
  /// Truncation radius and partial value after each refinement.
  std::vector<double> radii;
  std::vector<double> refinement_trace;
  std::string note;

  bool convergent() const { return status == Verdict::convergent; }
};

struct QuadratureSettings {
  double rel_tol = 1e-6;
  double piece_tol = 1e-11;
  int max_depth = 15;
  double divergence_factor = 1.05;
  int divergence_doublings = 3;
  double max_radius = 1e140;

  HalfLineOptions options(double inner_radius, double asymptotic_radius) const;
};

/// int rho(xi) / (beta + 2 f(xi)) dxi, requires beta > 2C.
ConditionVerdict dalang_integral(const FourierSymbol& symbol, const SpectralMeasure& measure,
                                 double beta, const QuadratureSettings& settings = {});

struct DeterministicOptions {
  /// Integrate ||g_s||_1 over [0, T] without weight instead of the Laplace integral.
  std::optional<double> horizon;
  /// The condition is not needed without drift.
  bool drift_is_zero = false;
};

/// int_0^inf e^{-beta0 s} ||g_s||_1 ds (or the finite-horizon variant).
ConditionVerdict deterministic_condition(const DominatingKernel& kernel, double beta0,
                                         const DeterministicOptions& options = {},
                                         const QuadratureSettings& settings = {});

/// int e^{-2 s f(xi)} rho(xi) dxi scaled by the squared Fourier amplitude.
double spectral_part(const DominatingKernel& kernel, const SpectralMeasure& measure, double s,
                     const QuadratureSettings& settings = {1e-10});

/// I(s) = ||g_s||_1 + int |g_s^(xi)|^2 rho(xi) dxi.
double I_of_s(const DominatingKernel& kernel, const SpectralMeasure& measure, double s,
              const QuadratureSettings& settings = {1e-10});

/// Laplace transform of the L^1 law at beta.
double laplace_l1(const DominatingKernel& kernel, double beta);

struct UpsilonResult {
  double beta = 0.0;
  /// A^2 * int rho / (beta + 2 f) plus the Laplace transform of ||g_s||_1.
  double value = 0.0;
  double spectral_frequency = 0.0;
  double spectral_time = 0.0;
  double l1_frequency = 0.0;
  double l1_time = 0.0;
  /// int_0^inf e^{-beta s} I(s) ds by quadrature in s.
  double time_value = 0.0;
  double relative_discrepancy = 0.0;
};

/// Maximum relative disagreement tolerated between the two Upsilon routes.
inline constexpr double kTonelliTolerance = 1e-4;

/// Upsilon(beta) evaluated in frequency and in time; throws ConsistencyError
/// when the two routes disagree by more than kTonelliTolerance.
UpsilonResult upsilon(const DominatingKernel& kernel, const SpectralMeasure& measure, double beta);

/// Frequency-domain Upsilon only.
double upsilon_frequency(const DominatingKernel& kernel, const SpectralMeasure& measure, double beta,
                         const QuadratureSettings& settings = {});

/// Upsilon on a grid of beta values using one fixed node set, so that the
/// returned values are non-increasing in beta exactly as evaluated.
std::vector<double> upsilon_curve(const DominatingKernel& kernel, const SpectralMeasure& measure,
                                  const std::vector<double>& betas);

/// (s, |xi|) -> g_s^(xi) for the generalized condition.
using FourierKernelFn = std::function<double(double s, double r)>;

struct GeneralizedOptions {
  double rel_tol = 1e-4;
  /// Radius from which verdicts may be issued; 0 picks 4 max(1, 1/T, sqrt(beta)).
  double asymptotic_radius = 0.0;
};

/// int_0^T int e^{-beta s} g_s^(xi)^2 rho(xi) dxi ds. T may be +inf when beta > 0.
ConditionVerdict generalized_condition(const FourierKernelFn& ghat, const SpectralMeasure& measure,
                                       double beta, double horizon,
                                       const GeneralizedOptions& options = {});

FourierKernelFn wave_fourier_kernel();

/// sup_{t <= T, x} int |G_t(x - y)| |u0(y)| dy. With a grid the convolution is
/// evaluated by spectral multiplication on the grid; otherwise the bound
/// ||u0||_inf sup_t ||g_t||_1 is returned. Throws IntegrabilityError when the
/// L^1 law is unbounded on (0, T].
double initial_condition_bound(const DominatingKernel& kernel, const InitialData& u0, double horizon,
                               const std::optional<Grid>& grid = std::nullopt);

struct PicardRateBound {
  double iota = 0.0;
  double beta = 0.0;
  double upsilon = 0.0;
  double ratio = 0.0;
};

PicardRateBound contraction_rate(double iota, const DominatingKernel& kernel,
                                 const SpectralMeasure& measure, double beta);

inline constexpr double kBetaSearchMax = 1e8;
inline constexpr double kBetaSearchFloor = 1e-6;

/// Smallest beta (to bisection resolution) with iota * Upsilon(beta) <= target.
PicardRateBound find_contraction_beta(double iota, const DominatingKernel& kernel,
                                      const SpectralMeasure& measure, double target = 0.5);

/// Smallest admissible beta: above 2C and above the growth rate of ||g_s||_1.
double minimal_beta(const DominatingKernel& kernel);

}  // namespace spde
