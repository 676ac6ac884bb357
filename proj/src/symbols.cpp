#include "spde/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spde/errors.hpp"
#include "spde/fft.hpp"

namespace spde {

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::heat:
      return "heat";
    case KernelFamily::fractional:
      return "fractional";
    case KernelFamily::kolmogorov:
      return "kolmogorov";
    case KernelFamily::gaussian_bound:
      return "gaussian_bound";
    case KernelFamily::mixture:
      return "mixture";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  for (auto f : {KernelFamily::heat, KernelFamily::fractional, KernelFamily::kolmogorov,
                 KernelFamily::gaussian_bound, KernelFamily::mixture}) {
    if (to_string(f) == name) return f;
  }
  throw PreconditionError("unknown kernel family '" + name + "'");
}

namespace {

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

std::string format(const char* name, std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os << name << '(';
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ", ";
    os << k << '=' << v;
    first = false;
  }
  os << ')';
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

FourierSymbol::FourierSymbol(int dim, std::function<double(double)> profile, double lower_bound,
                             double growth, KernelFamily family, std::string description)
    : dim_(dim),
      profile_(std::move(profile)),
      lower_bound_(lower_bound),
      growth_(growth),
      family_(family),
      description_(std::move(description)) {
  require(dim >= 1, "symbol dimension must be positive");
  require(lower_bound >= 0.0, "symbol lower bound C must be non-negative");
}

double FourierSymbol::operator()(std::span<const double> xi) const {
  require(static_cast<int>(xi.size()) == dim_, "frequency has the wrong dimension");
  return profile_(std::sqrt(squared_norm(xi)));
}

double FourierSymbol::semigroup_factor(double s, double r) const {
  return std::exp(-s * profile_(r));
}

// ---------------------------------------------------------------------------

L1Law L1Law::exponential(double amplitude, double rate, bool exact) {
  L1Law law;
  law.amplitude = amplitude;
  law.rate = rate;
  law.exact = exact;
  return law;
}

L1Law L1Law::from_function(std::function<double(double)> fn, bool exact) {
  L1Law law;
  law.custom = std::move(fn);
  law.exact = exact;
  return law;
}

double L1Law::operator()(double s) const {
  if (custom) return custom(s);
  return amplitude * std::exp(rate * s);
}

// ---------------------------------------------------------------------------

HomogeneousNorm::HomogeneousNorm(std::vector<int> weights) : weights_(std::move(weights)) {
  require(!weights_.empty(), "homogeneous norm needs at least one coordinate");
  for (int w : weights_) require(w >= 1, "block weights must be positive integers");
}

HomogeneousNorm HomogeneousNorm::euclidean(int dim) {
  return HomogeneousNorm(std::vector<int>(static_cast<std::size_t>(dim), 1));
}

int HomogeneousNorm::homogeneous_dim() const {
  int q = 0;
  for (int w : weights_) q += w;
  return q;
}

bool HomogeneousNorm::is_euclidean() const {
  return std::all_of(weights_.begin(), weights_.end(), [](int w) { return w == 1; });
}

double HomogeneousNorm::operator()(std::span<const double> x) const {
  require(x.size() == weights_.size(), "point has the wrong dimension for the norm");
  if (is_euclidean()) return std::sqrt(squared_norm(x));
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m = std::max(m, std::pow(std::abs(x[i]), 1.0 / weights_[i]));
  }
  return m;
}

std::vector<double> HomogeneousNorm::dilate(double lambda, std::span<const double> x) const {
  require(x.size() == weights_.size(), "point has the wrong dimension for the norm");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::pow(lambda, weights_[i]) * x[i];
  return out;
}

double HomogeneousNorm::unit_ball_volume() const {
  if (is_euclidean()) {
    const int d = dim();
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  }
  // {max |x_i|^{1/w_i} <= 1} is the unit cube.
  return std::pow(2.0, dim());
}

// ---------------------------------------------------------------------------

DominatingKernel::DominatingKernel(int dim, KernelFamily family,
                                   std::optional<FourierSymbol> symbol, double fourier_amplitude,
                                   RealEval eval_real, L1Law l1_law, bool exact_fundamental,
                                   std::string description)
    : dim_(dim),
      family_(family),
      symbol_(std::move(symbol)),
      amplitude_(fourier_amplitude),
      eval_real_(std::move(eval_real)),
      l1_law_(std::move(l1_law)),
      exact_fundamental_(exact_fundamental),
      description_(std::move(description)) {}

const FourierSymbol& DominatingKernel::symbol() const {
  if (!symbol_) {
    throw SymbolUnavailable("kernel '" + description_ +
                            "' has no Fourier symbol; only the generalized condition applies");
  }
  return *symbol_;
}

double DominatingKernel::fourier(double s, double r) const {
  return amplitude_ * symbol().semigroup_factor(s, r);
}

double DominatingKernel::eval_real(double t, std::span<const double> x) const {
  if (!eval_real_) throw PreconditionError("kernel '" + description_ + "' has no closed form");
  require(t > 0.0, "kernel time must be positive");
  require(static_cast<int>(x.size()) == dim_, "point has the wrong dimension for the kernel");
  return eval_real_(t, x);
}

// ---------------------------------------------------------------------------

FourierSymbol heat_symbol(int dim) {
  require(dim >= 1, "dimension must be positive");
  return FourierSymbol(
      dim, [](double r) { return r * r; }, 0.0, 2.0, KernelFamily::heat, "heat(d=" + std::to_string(dim) + ")");
}

FourierSymbol fractional_heat_symbol(int dim, double order, double mass_gain) {
  require(dim >= 1, "dimension must be positive");
  require(order > 0.0 && order <= 1.0,
          "fractional order must lie in (0, 1]; stable densities are not positive beyond 1");
  require(mass_gain >= 0.0, "mass gain C must be non-negative");
  return FourierSymbol(
      dim, [order, mass_gain](double r) { return std::pow(r, 2.0 * order) - mass_gain; }, mass_gain,
      2.0 * order, KernelFamily::fractional,
      format("fractional", {{"d", dim}, {"s", order}, {"C", mass_gain}}));
}

FourierSymbol mixture_symbol(const FourierSymbol& a, const FourierSymbol& b) {
  if (a.dim() != b.dim()) throw PreconditionError("mixture of symbols with different dimensions");
  return FourierSymbol(
      a.dim(), [a, b](double r) { return a.at_radius(r) + b.at_radius(r); },
      a.lower_bound() + b.lower_bound(), std::max(a.growth(), b.growth()), KernelFamily::mixture,
      "mixture(" + a.description() + " + " + b.description() + ")");
}

DominatingKernel heat_kernel(int dim) {
  auto eval = [dim](double t, std::span<const double> x) {
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * dim) * std::exp(-squared_norm(x) / (4.0 * t));
  };
  return DominatingKernel(dim, KernelFamily::heat, heat_symbol(dim), 1.0, eval,
                          L1Law::exponential(1.0, 0.0), true, "heat(d=" + std::to_string(dim) + ")");
}

DominatingKernel fractional_heat_kernel(int dim, double order, double mass_gain) {
  auto symbol = fractional_heat_symbol(dim, order, mass_gain);
  DominatingKernel::RealEval eval;
  if (order == 1.0) {
    eval = [dim, mass_gain](double t, std::span<const double> x) {
      return std::exp(mass_gain * t) * std::pow(4.0 * std::numbers::pi * t, -0.5 * dim) *
             std::exp(-squared_norm(x) / (4.0 * t));
    };
  } else if (order == 0.5) {
    // Poisson kernel of e^{-t|xi|}.
    eval = [dim, mass_gain](double t, std::span<const double> x) {
      const double h = 0.5 * (dim + 1);
      return std::exp(mass_gain * t) * std::tgamma(h) / std::pow(std::numbers::pi, h) * t /
             std::pow(t * t + squared_norm(x), h);
    };
  }
  return DominatingKernel(dim, KernelFamily::fractional, symbol, 1.0, eval,
                          L1Law::exponential(1.0, mass_gain), true, symbol.description());
}

DominatingKernel kolmogorov_kernel() {
  auto eval = [](double t, std::span<const double> p) {
    const double x = p[0];
    const double y = p[1];
    return std::sqrt(3.0) / (2.0 * std::numbers::pi * t * t) *
           std::exp(-x * x / t - 3.0 * x * y / (t * t) - 3.0 * y * y / (t * t * t));
  };
  return DominatingKernel(2, KernelFamily::kolmogorov, std::nullopt, 1.0, eval,
                          L1Law::exponential(1.0, 0.0), true, "kolmogorov(n=1)");
}

DominatingKernel kolmogorov_euclidean_bound(double constant) {
  require(constant > 0.0, "Gaussian bound constant must be positive");
  const double c = constant;
  auto eval = [c](double t, std::span<const double> p) {
    return c / (t * t) * std::exp(-squared_norm(p) / (c * t));
  };
  auto law = [c](double t) { return std::numbers::pi * c * c / t; };
  return DominatingKernel(2, KernelFamily::kolmogorov, std::nullopt, 1.0, eval,
                          L1Law::from_function(law), false,
                          format("kolmogorov_euclidean_bound", {{"C", c}}));
}

DominatingKernel gaussian_bound_kernel(const HomogeneousNorm& norm, double c1, double c2) {
  require(c1 > 0.0 && c2 > 0.0, "Gaussian bound constants c1, c2 must be positive");
  const double q = norm.homogeneous_dim();
  auto eval = [norm, c1, c2, q](double t, std::span<const double> x) {
    const double n = norm(x);
    return c1 * std::pow(t, -0.5 * q) * std::exp(-c2 * n * n / t);
  };
  // int exp(-c2 |x|_G^2) dx via the layer-cake formula with |B_G(r)| = V r^q.
  const double mass = c1 * norm.unit_ball_volume() * std::tgamma(0.5 * q + 1.0) * std::pow(c2, -0.5 * q);
  std::ostringstream desc;
  desc << "gaussian_bound(weights=";
  for (std::size_t i = 0; i < norm.weights().size(); ++i) desc << (i ? "," : "") << norm.weights()[i];
  desc << ", c1=" << c1 << ", c2=" << c2 << ")";
  std::optional<FourierSymbol> symbol;
  if (norm.is_euclidean()) {
    symbol = FourierSymbol(
        norm.dim(), [c2](double r) { return r * r / (4.0 * c2); }, 0.0, 2.0,
        KernelFamily::gaussian_bound, desc.str());
  }
  return DominatingKernel(norm.dim(), KernelFamily::gaussian_bound, symbol, mass, eval,
                          L1Law::exponential(mass, 0.0), false, desc.str());
}

DominatingKernel mixture_kernel(const DominatingKernel& a, const DominatingKernel& b) {
  auto symbol = mixture_symbol(a.symbol(), b.symbol());
  L1Law law;
  if (a.l1_law().is_exponential() && b.l1_law().is_exponential()) {
    law = L1Law::exponential(a.l1_law().amplitude * b.l1_law().amplitude,
                             a.l1_law().rate + b.l1_law().rate, false);
  } else {
    auto la = a.l1_law();
    auto lb = b.l1_law();
    law = L1Law::from_function([la, lb](double s) { return la(s) * lb(s); }, false);
  }
  return DominatingKernel(a.dim(), KernelFamily::mixture, symbol,
                          a.fourier_amplitude() * b.fourier_amplitude(), {}, law,
                          a.is_exact_fundamental() && b.is_exact_fundamental(), symbol.description());
}

std::vector<double> kernel_realspace(const FourierSymbol& symbol, double s, const Grid& grid,
                                     double fourier_amplitude) {
  require(s > 0.0, "kernel time must be positive");
  require(symbol.dim() == grid.dim(), "symbol and grid dimensions differ");
  const double nyquist_factor = symbol.semigroup_factor(s, grid.nyquist());
  if (!(nyquist_factor < kNyquistDecay)) {
    std::ostringstream os;
    os << "grid does not resolve e^{-s f} for s=" << s << ": factor " << nyquist_factor
       << " at the Nyquist frequency " << grid.nyquist() << " exceeds " << kNyquistDecay
       << "; refine N or enlarge s";
    throw ResolutionError(os.str());
  }
  RealFft fft(grid);
  std::vector<Complex> spectrum(grid.spectral_size());
  const double scale = fourier_amplitude * static_cast<double>(grid.size()) /
                       std::pow(grid.length(), grid.dim());
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto k = grid.wavenumber(i);
    // Centring shift e^{i xi (-L/2)} = (-1)^k per axis.
    const double sign = ((k[0] + k[1] + k[2]) % 2 == 0) ? 1.0 : -1.0;
    spectrum[i] = sign * scale * symbol.semigroup_factor(s, grid.frequency_norm(i));
  }
  std::vector<double> field(grid.size());
  fft.inverse(spectrum, field);
  return field;
}

}  // namespace spde
