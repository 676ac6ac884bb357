#include "spde/noise.hpp"

#include <array>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spde/errors.hpp"
#include "spde/parallel.hpp"

namespace spde {

std::string to_string(ZeroMode z) { return z == ZeroMode::zero ? "zero" : "cell_average"; }

ZeroMode zero_mode_from_string(const std::string& name) {
  if (name == "cell_average") return ZeroMode::cell_average;
  if (name == "zero") return ZeroMode::zero;
  throw PreconditionError("unknown zero-mode policy '" + name + "'");
}

namespace {

// rho at a point, with the origin (a null set where rho may blow up) mapped to 0.
template <std::size_t D>
double density_off_origin(const SpectralMeasure& m, const std::array<double, D>& xi) {
  for (double c : xi) {
    if (c != 0.0) return m.density(xi);
  }
  return 0.0;
}

// Integral of rho over [0, a]^d with the signs of the axes given by `sign`.
double orthant_integral(const SpectralMeasure& m, double a, const std::array<double, 3>& sign) {
  boost::math::quadrature::tanh_sinh<double> rule(10);
  constexpr double tol = 1e-9;
  const int d = m.dim();
  if (d == 1) {
    return rule.integrate([&](double u) {
      return density_off_origin(m, std::array<double, 1>{sign[0] * u});
    }, 0.0, a, tol);
  }
  if (d == 2) {
    return rule.integrate([&](double u) {
      boost::math::quadrature::tanh_sinh<double> inner(10);
      return inner.integrate([&](double v) {
        return density_off_origin(m, std::array<double, 2>{sign[0] * u, sign[1] * v});
      }, 0.0, a, tol);
    }, 0.0, a, tol);
  }
  return rule.integrate([&](double u) {
    boost::math::quadrature::tanh_sinh<double> middle(8);
    return middle.integrate([&](double v) {
      boost::math::quadrature::tanh_sinh<double> inner(8);
      return inner.integrate([&](double w) {
        return density_off_origin(m, std::array<double, 3>{sign[0] * u, sign[1] * v, sign[2] * w});
      }, 0.0, a, tol);
    }, 0.0, a, tol);
  }, 0.0, a, tol);
}

double zero_cell_integral(const Grid& grid, const SpectralMeasure& m) {
  const double a = std::numbers::pi / grid.length();
  const int d = m.dim();
  if (m.is_radial()) return std::ldexp(orthant_integral(m, a, {1.0, 1.0, 1.0}), d);
  double total = 0.0;
  for (int mask = 0; mask < (1 << d); ++mask) {
    std::array<double, 3> sign{1.0, 1.0, 1.0};
    for (int axis = 0; axis < d; ++axis) {
      if (mask & (1 << axis)) sign[static_cast<std::size_t>(axis)] = -1.0;
    }
    total += orthant_integral(m, a, sign);
  }
  return total;
}

}  // namespace

std::vector<double> spectral_weights(const Grid& grid, const SpectralMeasure& measure, ZeroMode zero_mode) {
  require(grid.dim() == measure.dim(), "grid and measure dimensions differ");
  const double cell = grid.frequency_cell_volume();
  const int d = grid.dim();
  std::vector<double> w(grid.spectral_size());
  for (std::size_t k = 1; k < w.size(); ++k) {
    const auto xi = grid.frequency(k);
    const double rho = measure.density(std::span<const double>(xi.data(), static_cast<std::size_t>(d)));
    if (!std::isfinite(rho) || rho < 0.0) {
      std::ostringstream os;
      os << "spectral density is " << rho << " at grid frequency |xi|=" << grid.frequency_norm(k)
         << "; shift or refine the grid so no singular point sits on a nonzero node";
      throw PreconditionError(os.str());
    }
    w[k] = rho * cell;
  }
  w[0] = zero_mode == ZeroMode::zero ? 0.0 : zero_cell_integral(grid, measure);
  return w;
}

void standard_normal_field(const Philox& rng, std::size_t replica, std::size_t step, StreamTag tag,
                           std::span<double> out) {
  for (std::size_t m = 0; m < out.size(); m += 2) {
    const auto z = rng.normal_pair(make_counter(m / 2, step, replica, tag));
    out[m] = z[0];
    if (m + 1 < out.size()) out[m + 1] = z[1];
  }
}

NoiseSampler::NoiseSampler(const Grid& grid, const SpectralMeasure& measure, std::uint64_t seed,
                           ZeroMode zero_mode)
    : grid_(grid),
      seed_(seed),
      zero_mode_(zero_mode),
      weights_(spectral_weights(grid, measure, zero_mode)),
      rng_(seed),
      fft_(grid) {
  amplitude_.resize(weights_.size());
  const double scale = static_cast<double>(grid.size()) * grid.dt();
  for (std::size_t k = 0; k < weights_.size(); ++k) amplitude_[k] = std::sqrt(scale * weights_[k]);
}

void NoiseSampler::colour(std::span<const double> white, std::span<double> out) const {
  require(white.size() == grid_.size() && out.size() == grid_.size(), "field size does not match grid");
  std::vector<Complex> spectrum(grid_.spectral_size());
  fft_.forward(white, spectrum);
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= amplitude_[k];
  fft_.inverse(spectrum, out);
}

void NoiseSampler::sample(std::size_t replica, std::size_t step, std::span<double> out) const {
  std::vector<double> white(grid_.size());
  standard_normal_field(rng_, replica, step, StreamTag::noise, white);
  colour(white, out);
}

std::vector<double> NoiseSampler::sample(std::size_t replica, std::size_t step) const {
  std::vector<double> out(grid_.size());
  sample(replica, step, out);
  return out;
}

double NoiseSampler::covariance(long lag) const {
  const double shift = static_cast<double>(lag) * grid_.dx();
  double c = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    c += grid_.hermitian_multiplicity(k) * weights_[k] * std::cos(grid_.frequency(k)[0] * shift);
  }
  return grid_.dt() * c;
}

// ---------------------------------------------------------------------------

double discrete_h_norm(const SpaceTimeField& x, const SpectralMeasure& measure, const Grid& grid,
                       ZeroMode zero_mode) {
  const std::size_t n = grid.size();
  if (x.size() != grid.steps() * n) {
    throw PreconditionError("space-time field has " + std::to_string(x.size()) + " values, grid expects " +
                            std::to_string(grid.steps() * n));
  }
  const auto w = spectral_weights(grid, measure, zero_mode);
  RealFft fft(grid);
  std::vector<Complex> spectrum(grid.spectral_size());
  const double cell = grid.cell_volume();
  double total = 0.0;
  for (std::size_t i = 0; i < grid.steps(); ++i) {
    fft.forward(std::span<const double>(x.data() + i * n, n), spectrum);
    double s = 0.0;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      s += grid.hermitian_multiplicity(k) * std::norm(spectrum[k]) * w[k];
    }
    total += grid.dt() * cell * cell * s;
  }
  return total;
}

namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
};

// z-score of the sample mean of iid values against `expected`.
double z_score(const Moments& m, std::size_t count, double expected, double* se_out = nullptr) {
  const double n = static_cast<double>(count);
  const double mean = m.sum / n;
  const double var = std::max(0.0, (m.sum_sq - n * mean * mean) / (n - 1.0));
  const double se = std::sqrt(var / n);
  if (se_out) *se_out = se;
  if (se == 0.0) return mean == expected ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean - expected);
  return (mean - expected) / se;
}

constexpr std::size_t kReplicaBlock = 256;

}  // namespace

IsometryReport isometry_check(const SpaceTimeField& x, const SpectralMeasure& measure, const Grid& grid,
                              std::size_t replicas, std::uint64_t seed, ZeroMode zero_mode,
                              unsigned workers) {
  require(replicas >= 2, "isometry check needs at least two replicas");
  const std::size_t n = grid.size();
  IsometryReport report;
  report.replicas = replicas;
  report.exact = discrete_h_norm(x, measure, grid, zero_mode);
  const NoiseSampler sampler(grid, measure, seed, zero_mode);
  const double cell = grid.cell_volume();

  const std::size_t blocks = (replicas + kReplicaBlock - 1) / kReplicaBlock;
  std::vector<Moments> partial(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    std::vector<double> dw(n);
    const std::size_t end = std::min(replicas, (b + 1) * kReplicaBlock);
    for (std::size_t r = b * kReplicaBlock; r < end; ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < grid.steps(); ++i) {
        sampler.sample(r, i, dw);
        for (std::size_t m = 0; m < n; ++m) s += x[i * n + m] * dw[m];
      }
      s *= cell;
      partial[b].add(s * s);
    }
  });
  Moments total;
  for (const auto& p : partial) total.merge(p);
  report.empirical = total.sum / static_cast<double>(replicas);
  report.z = z_score(total, replicas, report.exact, &report.standard_error);
  return report;
}

bool NoiseValidation::passed(double bound) const {
  return std::abs(variance_z) <= bound && std::abs(cross_cov_z) <= bound && stationarity_max_dev <= bound;
}

NoiseValidation validate_noise(const NoiseSampler& sampler, std::size_t replicas, unsigned workers) {
  require(replicas >= 2, "noise validation needs at least two replicas");
  const Grid& grid = sampler.grid();
  const std::size_t n = grid.size();
  const std::size_t per_axis = grid.points();
  const std::size_t row = n / per_axis;
  const long lag = std::max<long>(1, static_cast<long>(per_axis / 32));
  const std::array<std::size_t, 4> bases{0, per_axis / 4, per_axis / 2, 3 * per_axis / 4};

  struct Block {
    Moments variance;
    Moments cross;
    std::array<Moments, 4> pairs;
  };
  const std::size_t blocks = (replicas + kReplicaBlock - 1) / kReplicaBlock;
  std::vector<Block> partial(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    std::vector<double> f0(n), f1(n);
    const std::size_t end = std::min(replicas, (b + 1) * kReplicaBlock);
    for (std::size_t r = b * kReplicaBlock; r < end; ++r) {
      sampler.sample(r, 0, f0);
      sampler.sample(r, 1, f1);
      double v = 0.0;
      double c = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        v += f0[m] * f0[m];
        c += f0[m] * f1[m];
      }
      partial[b].variance.add(v / static_cast<double>(n));
      partial[b].cross.add(c / static_cast<double>(n));
      for (std::size_t p = 0; p < bases.size(); ++p) {
        const std::size_t a = bases[p] * row;
        const std::size_t c2 = ((bases[p] + static_cast<std::size_t>(lag)) % per_axis) * row;
        partial[b].pairs[p].add(f0[a] * f0[c2]);
      }
    }
  });
  Block total;
  for (const auto& p : partial) {
    total.variance.merge(p.variance);
    total.cross.merge(p.cross);
    for (std::size_t i = 0; i < total.pairs.size(); ++i) total.pairs[i].merge(p.pairs[i]);
  }

  NoiseValidation out;
  out.replicas = replicas;
  out.site_variance = sampler.site_variance();
  out.empirical_variance = total.variance.sum / static_cast<double>(replicas);
  out.variance_z = z_score(total.variance, replicas, out.site_variance);
  out.cross_cov_z = z_score(total.cross, replicas, 0.0);
  out.stationarity_lag = lag;
  const double expected = sampler.covariance(lag);
  for (const auto& p : total.pairs) {
    out.stationarity_max_dev = std::max(out.stationarity_max_dev, std::abs(z_score(p, replicas, expected)));
  }
  return out;
}

}  // namespace spde
