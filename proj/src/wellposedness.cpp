#include "spde/wellposedness.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spde/errors.hpp"
#include "spde/fft.hpp"

namespace spde {

HalfLineOptions QuadratureSettings::options(double inner_radius, double asymptotic_radius) const {
  HalfLineOptions o;
  o.rel_tol = rel_tol;
  o.piece_tol = piece_tol;
  o.max_depth = max_depth;
  o.divergence_factor = divergence_factor;
  o.divergence_doublings = divergence_doublings;
  o.max_radius = max_radius;
  o.inner_radius = inner_radius;
  o.asymptotic_radius = asymptotic_radius;
  return o;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest power of two R >= 1 with 2 f(R) >= level.
double growth_radius(const FourierSymbol& symbol, double level) {
  double r = 1.0;
  while (2.0 * symbol.at_radius(r) < level && r < 1e120) r *= 2.0;
  return r;
}

ConditionVerdict to_verdict(const HalfLineResult& r, double beta) {
  ConditionVerdict v;
  v.status = r.status;
  v.value = r.status == Verdict::convergent ? r.value : (r.status == Verdict::divergent ? kInf : r.value);
  v.beta = beta;
  v.tail_estimate = r.tail_estimate;
  v.radii = r.radii;
  v.refinement_trace = r.partials;
  return v;
}

// rho ~ r^{-a} at the origin: the radial integrand behaves like r^{d-1-a}.
double radial_origin_exponent(const SpectralMeasure& m) { return m.dim() - 1 - m.origin_exponent(); }

// Near s = 0 the spectral part of I(s) behaves like s^{-(d-b)/p}.
double time_origin_exponent(const FourierSymbol& sym, const SpectralMeasure& m) {
  const double b = m.tail_exponent();
  if (!(b < m.dim())) return 0.0;
  return -(m.dim() - b) / sym.growth();
}

void check_dims(const FourierSymbol& sym, const SpectralMeasure& m) {
  if (sym.dim() != m.dim()) {
    throw PreconditionError("symbol dimension " + std::to_string(sym.dim()) +
                            " differs from measure dimension " + std::to_string(m.dim()));
  }
}

void check_beta(const FourierSymbol& sym, double beta) {
  if (!(beta > 2.0 * sym.lower_bound())) {
    std::ostringstream os;
    os << "beta=" << beta << " must exceed 2C=" << 2.0 * sym.lower_bound();
    throw PreconditionError(os.str());
  }
}

// Laplace-type integral of a positive function of time over (0, inf), or over
// (0, T] when a horizon is given. The neighbourhood of s = 0 is mapped to a
// tail by u = 1/s so that singular behaviour is detected from annulus ratios.
constexpr double kMaxTimePanels = 1 << 20;

// int_0^S h with fixed 15-point Gauss panels of at most half a period of
// sin(r s), the first panel further split geometrically down to 2^-48 of its
// width so that mass concentrated near s = 0 (like e^{-s r^2}) is not missed.
double oscillatory_time_integral(const std::function<double(double)>& h, double span, double r) {
  using rule = boost::math::quadrature::gauss<double, 15>;
  const double panels = std::clamp(std::ceil(r * span / std::numbers::pi), 1.0, kMaxTimePanels);
  const auto n = static_cast<std::size_t>(panels);
  const double width = span / panels;
  double sum = 0.0;
  for (std::size_t p = 1; p < n; ++p) {
    sum += rule::integrate(h, width * static_cast<double>(p), width * static_cast<double>(p + 1));
  }
  double hi = width;
  for (int k = 0; k < 48; ++k) {
    sum += rule::integrate(h, 0.5 * hi, hi);
    hi *= 0.5;
  }
  return sum + hi * h(0.5 * hi);
}

// `rate` is the exponential weight inside h; under u = 1/s the factor e^{-rate/u}
// has log-slope rate/u, so verdicts wait until u >= 16 rate.
ConditionVerdict time_integral(const std::function<double(double)>& h, std::optional<double> horizon,
                               double rate, const QuadratureSettings& settings) {
  const double split = horizon ? *horizon : 1.0;
  HalfLineIntegrand near;
  near.f = [&h, split](double u) {
    if (u < 1.0 / split) return 0.0;
    return h(1.0 / u) / (u * u);
  };
  const auto near_result =
      integrate_half_line(near, settings.options(1.0 / split, std::max(4.0 / split, 16.0 * rate)));

  HalfLineResult far_result;
  far_result.status = Verdict::convergent;
  if (!horizon) {
    HalfLineIntegrand far;
    far.f = [&h](double s) { return s < 1.0 ? 0.0 : h(s); };
    far_result = integrate_half_line(far, settings.options(1.0, 4.0));
  }

  ConditionVerdict v;
  v.radii = near_result.radii;
  v.refinement_trace = near_result.partials;
  v.radii.insert(v.radii.end(), far_result.radii.begin(), far_result.radii.end());
  v.refinement_trace.insert(v.refinement_trace.end(), far_result.partials.begin(),
                            far_result.partials.end());
  if (near_result.status == Verdict::divergent || far_result.status == Verdict::divergent) {
    v.status = Verdict::divergent;
    v.value = kInf;
  } else if (near_result.status == Verdict::convergent && far_result.status == Verdict::convergent) {
    v.status = Verdict::convergent;
    v.value = near_result.value + far_result.value;
    v.tail_estimate = near_result.tail_estimate + far_result.tail_estimate;
  } else {
    v.status = Verdict::inconclusive;
    v.value = near_result.value + far_result.value;
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

ConditionVerdict dalang_integral(const FourierSymbol& symbol, const SpectralMeasure& measure,
                                 double beta, const QuadratureSettings& settings) {
  check_dims(symbol, measure);
  check_beta(symbol, beta);
  if (!measure.exponents_declared()) {
    ConditionVerdict v;
    v.beta = beta;
    v.note = "spectral measure '" + measure.description() + "' has undeclared exponents";
    return v;
  }
  HalfLineIntegrand integrand;
  integrand.f = [&](double r) { return measure.shell_density(r) / (beta + 2.0 * symbol.at_radius(r)); };
  integrand.origin_exponent = radial_origin_exponent(measure);
  integrand.tail_decay = measure.tail_exponent() + symbol.growth() - measure.dim() + 1.0;
  const double asymptotic = 4.0 * growth_radius(symbol, std::max(beta, 1.0));
  auto v = to_verdict(integrate_half_line(integrand, settings.options(1.0, asymptotic)), beta);
  v.note = symbol.description() + " / " + measure.description();
  return v;
}

ConditionVerdict deterministic_condition(const DominatingKernel& kernel, double beta0,
                                         const DeterministicOptions& options,
                                         const QuadratureSettings& settings) {
  ConditionVerdict v;
  v.beta = beta0;
  if (options.drift_is_zero) {
    v.status = Verdict::convergent;
    v.value = 0.0;
    v.tail_estimate = 0.0;
    v.note = "skipped: drift is identically zero";
    return v;
  }
  const auto& law = kernel.l1_law();
  if (law.is_exponential()) {
    const double a = law.amplitude;
    const double c = law.rate;
    if (options.horizon) {
      const double t = *options.horizon;
      require(t > 0.0, "horizon must be positive");
      v.status = Verdict::convergent;
      v.value = c == 0.0 ? a * t : a * std::expm1(c * t) / c;
      v.note = "closed form, finite horizon";
    } else if (beta0 > c) {
      v.status = Verdict::convergent;
      v.value = a / (beta0 - c);
      v.note = "closed form";
    } else {
      v.status = Verdict::divergent;
      v.value = kInf;
      v.note = "||g_s||_1 grows at least as fast as e^{beta0 s}";
    }
    v.tail_estimate = 0.0;
    return v;
  }
  auto weighted = [&law, beta0, &options](double s) {
    return options.horizon ? law(s) : std::exp(-beta0 * s) * law(s);
  };
  v = time_integral(weighted, options.horizon, options.horizon ? 0.0 : beta0, settings);
  v.beta = beta0;
  v.note = "quadrature of the L1 law";
  return v;
}

double spectral_part(const DominatingKernel& kernel, const SpectralMeasure& measure, double s,
                     const QuadratureSettings& settings) {
  require(s > 0.0, "I(s) needs s > 0");
  const auto& symbol = kernel.symbol();
  check_dims(symbol, measure);
  HalfLineIntegrand integrand;
  integrand.f = [&](double r) {
    return measure.shell_density(r) * std::exp(-2.0 * s * symbol.at_radius(r));
  };
  integrand.origin_exponent = radial_origin_exponent(measure);
  integrand.tail_decay = kInf;
  const double asymptotic = 4.0 * growth_radius(symbol, 1.0 / s);
  const auto r = integrate_half_line(integrand, settings.options(1.0, asymptotic));
  if (r.status != Verdict::convergent) {
    std::ostringstream os;
    os << "spectral part of I(s) at s=" << s << " is " << to_string(r.status) << " for "
       << symbol.description() << " / " << measure.description();
    throw IntegrabilityError(os.str(), r.partials);
  }
  const double a = kernel.fourier_amplitude();
  return a * a * r.value;
}

double I_of_s(const DominatingKernel& kernel, const SpectralMeasure& measure, double s,
              const QuadratureSettings& settings) {
  return kernel.l1_norm(s) + spectral_part(kernel, measure, s, settings);
}

double laplace_l1(const DominatingKernel& kernel, double beta) {
  const auto& law = kernel.l1_law();
  if (law.is_exponential()) return beta > law.rate ? law.amplitude / (beta - law.rate) : kInf;
  const auto v = deterministic_condition(kernel, beta);
  return v.convergent() ? v.value : kInf;
}

double minimal_beta(const DominatingKernel& kernel) {
  double b = 2.0 * kernel.symbol_lower_bound();
  if (kernel.l1_law().is_exponential()) b = std::max(b, kernel.l1_law().rate);
  return b;
}

double upsilon_frequency(const DominatingKernel& kernel, const SpectralMeasure& measure, double beta,
                         const QuadratureSettings& settings) {
  const auto verdict = dalang_integral(kernel.symbol(), measure, beta, settings);
  if (!verdict.convergent()) {
    throw IntegrabilityError("Upsilon(" + std::to_string(beta) + ") needs a convergent spectral integral; got " +
                                 to_string(verdict.status),
                             verdict.refinement_trace);
  }
  const double a = kernel.fourier_amplitude();
  return a * a * verdict.value + laplace_l1(kernel, beta);
}

UpsilonResult upsilon(const DominatingKernel& kernel, const SpectralMeasure& measure, double beta) {
  const auto& symbol = kernel.symbol();
  UpsilonResult out;
  out.beta = beta;

  const auto verdict = dalang_integral(symbol, measure, beta);
  if (!verdict.convergent()) {
    throw IntegrabilityError("Upsilon needs a convergent spectral integral at beta=" + std::to_string(beta),
                             verdict.refinement_trace);
  }
  const double a = kernel.fourier_amplitude();
  out.spectral_frequency = a * a * verdict.value;
  out.l1_frequency = laplace_l1(kernel, beta);
  out.value = out.spectral_frequency + out.l1_frequency;

  // Time route: quadrature of e^{-beta s} I(s) with I(s) evaluated in frequency at each s.
  const double growth = std::max(2.0 * symbol.lower_bound(),
                                 kernel.l1_law().is_exponential() ? kernel.l1_law().rate : 0.0);
  const double decay = beta - growth;
  QuadratureSettings outer;
  outer.rel_tol = 1e-9;
  outer.piece_tol = 1e-10;
  QuadratureSettings inner;
  inner.rel_tol = 1e-11;
  inner.piece_tol = 1e-12;

  HalfLineIntegrand spectral_t;
  spectral_t.f = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp(-beta * s) * spectral_part(kernel, measure, s, inner);
  };
  spectral_t.origin_exponent = time_origin_exponent(symbol, measure);
  spectral_t.tail_decay = kInf;
  const double s0 = 1.0 / beta;
  const auto st = integrate_half_line(spectral_t, outer.options(s0, 8.0 / decay));
  if (st.status != Verdict::convergent) {
    throw ConsistencyError("time-domain spectral integral did not converge");
  }
  out.spectral_time = st.value;

  HalfLineIntegrand l1_t;
  l1_t.f = [&](double s) { return std::exp(-beta * s) * kernel.l1_norm(s); };
  l1_t.tail_decay = kInf;
  const auto lt = integrate_half_line(l1_t, outer.options(s0, 8.0 / decay));
  out.l1_time = lt.status == Verdict::convergent ? lt.value : kInf;

  out.time_value = out.spectral_time + out.l1_time;
  out.relative_discrepancy = std::abs(out.time_value - out.value) / std::abs(out.value);
  if (!(out.relative_discrepancy <= kTonelliTolerance)) {
    std::ostringstream os;
    os << "Upsilon(" << beta << ") disagrees between frequency (" << out.value << ") and time ("
       << out.time_value << ") routes: relative discrepancy " << out.relative_discrepancy;
    throw ConsistencyError(os.str());
  }
  return out;
}

std::vector<double> upsilon_curve(const DominatingKernel& kernel, const SpectralMeasure& measure,
                                  const std::vector<double>& betas) {
  require(!betas.empty(), "beta grid is empty");
  const auto& symbol = kernel.symbol();
  const double beta_min = *std::min_element(betas.begin(), betas.end());
  const auto reference = dalang_integral(symbol, measure, beta_min);
  if (!reference.convergent()) {
    throw IntegrabilityError("Upsilon curve needs a convergent spectral integral at the smallest beta",
                             reference.refinement_trace);
  }

  // Fixed composite Gauss-Kronrod nodes over the reference truncation radii.
  using rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  const auto& abscissa = rule::abscissa();
  const auto& weights = rule::weights();
  constexpr int kPanels = 16;
  std::vector<double> node_radius;
  std::vector<double> node_weight;
  std::vector<std::size_t> piece_begin;
  auto add_panel = [&](double a, double b, const std::function<double(double)>& map,
                       const std::function<double(double)>& jacobian) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        if (abscissa[i] == 0.0 && sign > 0.0) continue;
        const double v = c + sign * h * abscissa[i];
        node_radius.push_back(map(v));
        node_weight.push_back(h * weights[i] * jacobian(v));
      }
    }
  };
  const double kappa = radial_origin_exponent(measure);
  const double r0 = reference.radii.front();
  piece_begin.push_back(0);
  const double m = kappa < 0.0 ? 1.0 / (kappa + 1.0) : 1.0;
  for (int p = 0; p < kPanels; ++p) {
    add_panel(
        static_cast<double>(p) / kPanels, static_cast<double>(p + 1) / kPanels,
        [&](double v) { return r0 * std::pow(v, m); },
        [&](double v) { return r0 * m * std::pow(v, m - 1.0); });
  }
  for (std::size_t k = 1; k < reference.radii.size(); ++k) {
    piece_begin.push_back(node_radius.size());
    const double a = reference.radii[k - 1];
    const double b = reference.radii[k];
    for (int p = 0; p < kPanels; ++p) {
      const double lo = a + (b - a) * p / kPanels;
      const double hi = a + (b - a) * (p + 1) / kPanels;
      add_panel(lo, hi, [](double v) { return v; }, [](double) { return 1.0; });
    }
  }
  std::vector<double> shell(node_radius.size());
  std::vector<double> twice_symbol(node_radius.size());
  for (std::size_t i = 0; i < node_radius.size(); ++i) {
    shell[i] = node_weight[i] * measure.shell_density(node_radius[i]);
    twice_symbol[i] = 2.0 * symbol.at_radius(node_radius[i]);
  }

  const double q = measure.tail_exponent() + symbol.growth() - measure.dim() + 1.0;
  double tail_factor = 0.0;
  if (std::isfinite(q)) {
    const double rho = std::pow(2.0, 1.0 - q);
    tail_factor = rho / (1.0 - rho);
  }
  const double amp2 = kernel.fourier_amplitude() * kernel.fourier_amplitude();

  std::vector<double> out;
  out.reserve(betas.size());
  for (double beta : betas) {
    check_beta(symbol, beta);
    double total = 0.0;
    double last_piece = 0.0;
    const std::size_t last_begin = piece_begin.back();
    for (std::size_t i = 0; i < shell.size(); ++i) {
      const double term = shell[i] / (beta + twice_symbol[i]);
      total += term;
      if (i >= last_begin) last_piece += term;
    }
    out.push_back(amp2 * (total + tail_factor * last_piece) + laplace_l1(kernel, beta));
  }
  return out;
}

// ---------------------------------------------------------------------------

FourierKernelFn wave_fourier_kernel() {
  return [](double s, double r) { return r == 0.0 ? s : std::sin(s * r) / r; };
}

ConditionVerdict generalized_condition(const FourierKernelFn& ghat, const SpectralMeasure& measure,
                                       double beta, double horizon, const GeneralizedOptions& options) {
  require(horizon > 0.0, "horizon must be positive");
  require(std::isfinite(horizon) || beta > 0.0, "an infinite horizon needs beta > 0");
  require(beta >= 0.0, "beta must be non-negative");
  ConditionVerdict v;
  v.beta = beta;
  if (!measure.exponents_declared()) {
    v.note = "spectral measure '" + measure.description() + "' has undeclared exponents";
    return v;
  }
  // Time integral for fixed |xi| = r over [0, S]: S = T, or 50 / beta when T is
  // infinite (the weight has fallen below e^{-50} there).
  const double span = std::isfinite(horizon) ? horizon : 50.0 / beta;
  auto time_part = [&](double r) {
    auto h = [&](double s) {
      const double g = ghat(s, r);
      return std::exp(-beta * s) * g * g;
    };
    return oscillatory_time_integral(h, span, r);
  };

  HalfLineIntegrand integrand;
  integrand.f = [&](double r) { return measure.shell_density(r) * time_part(r); };
  integrand.origin_exponent = radial_origin_exponent(measure);
  double asymptotic = options.asymptotic_radius;
  if (asymptotic <= 0.0) {
    asymptotic = 4.0 * std::max({1.0, std::isfinite(horizon) ? 1.0 / horizon : 0.0, std::sqrt(beta)});
  }
  QuadratureSettings outer;
  outer.rel_tol = options.rel_tol;
  outer.piece_tol = std::min(1e-7, 1e-3 * options.rel_tol);
  outer.max_depth = 12;
  // Beyond this radius the half-period panels would exceed kMaxTimePanels.
  outer.max_radius = std::min(1e12, std::numbers::pi * kMaxTimePanels / span);
  v = to_verdict(integrate_half_line(integrand, outer.options(1.0, asymptotic)), beta);
  v.note = "generalized condition with " + measure.description();
  return v;
}

// ---------------------------------------------------------------------------

double initial_condition_bound(const DominatingKernel& kernel, const InitialData& u0, double horizon,
                               const std::optional<Grid>& grid) {
  require(horizon > 0.0, "horizon must be positive");
  if (grid) {
    const auto& symbol = kernel.symbol();
    require(symbol.dim() == grid->dim(), "kernel and grid dimensions differ");
    RealFft fft(*grid);
    auto data = u0.sample(*grid);
    for (auto& v : data) v = std::abs(v);
    std::vector<Complex> spectrum(grid->spectral_size());
    fft.forward(data, spectrum);
    std::vector<Complex> work(spectrum.size());
    std::vector<double> field(grid->size());
    double sup = kernel.fourier_amplitude() * *std::max_element(data.begin(), data.end());
    const std::size_t steps = grid->steps();
    for (std::size_t j = 1; j <= steps; ++j) {
      const double t = horizon * static_cast<double>(j) / static_cast<double>(steps);
      for (std::size_t i = 0; i < spectrum.size(); ++i) {
        work[i] = spectrum[i] * kernel.fourier(t, grid->frequency_norm(i));
      }
      fft.inverse(work, field);
      sup = std::max(sup, *std::max_element(field.begin(), field.end()));
    }
    return sup;
  }
  const auto& law = kernel.l1_law();
  double sup_l1;
  if (law.is_exponential()) {
    sup_l1 = law.amplitude * std::max(1.0, std::exp(law.rate * horizon));
  } else {
    std::vector<double> trace;
    sup_l1 = 0.0;
    for (int k = 0; k <= 60; ++k) {
      const double v = law(horizon * std::ldexp(1.0, -k));
      trace.push_back(v);
      if (!std::isfinite(v)) break;
      sup_l1 = std::max(sup_l1, v);
    }
    // Growth by more than a factor 1e6 between t = T and t = 2^-60 T is taken as unbounded.
    if (!std::isfinite(trace.back()) || trace.back() > 1e6 * std::max(trace.front(), 1e-300)) {
      throw IntegrabilityError("||g_t||_1 is unbounded on (0, T] for " + kernel.description(), trace);
    }
  }
  return u0.sup_norm() * sup_l1;
}

// ---------------------------------------------------------------------------

PicardRateBound contraction_rate(double iota, const DominatingKernel& kernel,
                                 const SpectralMeasure& measure, double beta) {
  require(iota >= 0.0, "iota must be non-negative");
  PicardRateBound b;
  b.iota = iota;
  b.beta = beta;
  b.upsilon = upsilon_frequency(kernel, measure, beta);
  b.ratio = iota * b.upsilon;
  return b;
}

PicardRateBound find_contraction_beta(double iota, const DominatingKernel& kernel,
                                      const SpectralMeasure& measure, double target) {
  require(iota >= 0.0, "iota must be non-negative");
  require(target > 0.0, "target ratio must be positive");
  const double beta_min = minimal_beta(kernel) + kBetaSearchFloor;
  if (iota == 0.0) {
    PicardRateBound b;
    b.iota = 0.0;
    b.beta = beta_min;
    b.upsilon = kInf;
    b.ratio = 0.0;
    return b;
  }
  auto ratio_at = [&](double beta) {
    try {
      return contraction_rate(iota, kernel, measure, beta).ratio;
    } catch (const IntegrabilityError&) {
      return kInf;
    }
  };
  if (ratio_at(beta_min) <= target) return contraction_rate(iota, kernel, measure, beta_min);
  double lo = beta_min;
  double hi = std::max(2.0 * beta_min, 1.0);
  while (ratio_at(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > kBetaSearchMax) {
      std::ostringstream os;
      os << "no beta below " << kBetaSearchMax << " gives iota * Upsilon(beta) <= " << target;
      throw IntegrabilityError(os.str(), {});
    }
  }
  while (hi - lo > 1e-4 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (ratio_at(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return contraction_rate(iota, kernel, measure, hi);
}

}  // namespace spde
