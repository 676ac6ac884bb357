#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spde/grid.hpp"

namespace spde {

enum class KernelFamily { heat, fractional, kolmogorov, gaussian_bound, mixture };

std::string to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& name);

/// Radial Fourier exponent f(xi) of a dominating kernel, g_s^ = A e^{-s f}.
///
/// Every catalogued symbol depends on |xi| only, so the symbol is stored as a
/// radial profile. `growth` is the power p with f(xi) ~ |xi|^p at infinity; the
/// well-posedness integrals use it as decay metadata.
class FourierSymbol {
 public:
  FourierSymbol(int dim, std::function<double(double)> profile, double lower_bound, double growth,
                KernelFamily family, std::string description);

  int dim() const { return dim_; }
  double lower_bound() const { return lower_bound_; }
  double growth() const { return growth_; }
  KernelFamily family() const { return family_; }
  const std::string& description() const { return description_; }

  double at_radius(double r) const { return profile_(r); }
  double operator()(std::span<const double> xi) const;
  /// e^{-s f(xi)} at radius r.
  double semigroup_factor(double s, double r) const;

 private:
  int dim_;
  std::function<double(double)> profile_;
  double lower_bound_;
  double growth_;
  KernelFamily family_;
  std::string description_;
};

/// s -> ||g_s||_{L^1}. Either amplitude * e^{rate s} or a tabulated function.
struct L1Law {
  double amplitude = 1.0;
  double rate = 0.0;
  /// false when the law only bounds the norm from above.
  bool exact = true;
  std::function<double(double)> custom;

  static L1Law exponential(double amplitude, double rate, bool exact = true);
  static L1Law from_function(std::function<double(double)> law, bool exact = true);

  bool is_exponential() const { return !custom; }
  double operator()(double s) const;
};

/// Anisotropic homogeneous norm |x|_G = max_i |x_i|^{1/w_i} of a graded
/// dilation structure; all-ones weights give the Euclidean norm.
class HomogeneousNorm {
 public:
  explicit HomogeneousNorm(std::vector<int> weights);
  static HomogeneousNorm euclidean(int dim);

  const std::vector<int>& weights() const { return weights_; }
  int dim() const { return static_cast<int>(weights_.size()); }
  /// Q - 2, the sum of the weights.
  int homogeneous_dim() const;
  bool is_euclidean() const;
  double operator()(std::span<const double> x) const;
  std::vector<double> dilate(double lambda, std::span<const double> x) const;
  /// Lebesgue volume of {|x|_G <= 1}.
  double unit_ball_volume() const;

 private:
  std::vector<int> weights_;
};

/// Integrable g_s >= |G_s| together with what is known about it in closed form.
class DominatingKernel {
 public:
  using RealEval = std::function<double(double t, std::span<const double> x)>;

  DominatingKernel(int dim, KernelFamily family, std::optional<FourierSymbol> symbol,
                   double fourier_amplitude, RealEval eval_real, L1Law l1_law,
                   bool exact_fundamental, std::string description);

  int dim() const { return dim_; }
  KernelFamily family() const { return family_; }
  bool has_symbol() const { return symbol_.has_value(); }
  /// Throws SymbolUnavailable for kernels known only in real space.
  const FourierSymbol& symbol() const;
  /// A with g_s^ = A e^{-s f}.
  double fourier_amplitude() const { return amplitude_; }
  double fourier(double s, double r) const;
  bool has_real_eval() const { return static_cast<bool>(eval_real_); }
  double eval_real(double t, std::span<const double> x) const;
  const L1Law& l1_law() const { return l1_law_; }
  double l1_norm(double s) const { return l1_law_(s); }
  bool is_exact_fundamental() const { return exact_fundamental_; }
  const std::string& description() const { return description_; }
  /// Lower bound C of the symbol, 0 when there is none.
  double symbol_lower_bound() const { return symbol_ ? symbol_->lower_bound() : 0.0; }

 private:
  int dim_;
  KernelFamily family_;
  std::optional<FourierSymbol> symbol_;
  double amplitude_;
  RealEval eval_real_;
  L1Law l1_law_;
  bool exact_fundamental_;
  std::string description_;
};

FourierSymbol heat_symbol(int dim);
FourierSymbol fractional_heat_symbol(int dim, double order, double mass_gain);
FourierSymbol mixture_symbol(const FourierSymbol& a, const FourierSymbol& b);

DominatingKernel heat_kernel(int dim);
DominatingKernel fractional_heat_kernel(int dim, double order, double mass_gain);
/// Exact Kolmogorov fundamental solution on R^2 (weights (1,3)).
DominatingKernel kolmogorov_kernel();
/// (C / t^2) exp(-(x^2 + y^2) / (C t)), the Euclidean bound of the Kolmogorov
/// kernel on a finite horizon. Its L^1 norm is pi C^2 / t.
DominatingKernel kolmogorov_euclidean_bound(double constant);
/// c1 t^{-(Q-2)/2} exp(-c2 |x|_G^2 / t).
DominatingKernel gaussian_bound_kernel(const HomogeneousNorm& norm, double c1, double c2);
/// Convolution of two kernels: symbols add, L^1 laws multiply (upper bound).
DominatingKernel mixture_kernel(const DominatingKernel& a, const DominatingKernel& b);

/// Samples g_s on the grid by inverse transform of e^{-s f}. The field is
/// centred: site coordinates come from Grid::coordinate.
std::vector<double> kernel_realspace(const FourierSymbol& symbol, double s, const Grid& grid,
                                     double fourier_amplitude = 1.0);

/// Admissibility threshold for kernel_realspace: e^{-s f} at the Nyquist radius.
inline constexpr double kNyquistDecay = 1e-12;

}  // namespace spde
