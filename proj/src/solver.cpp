#include "spde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "spde/errors.hpp"
#include "spde/parallel.hpp"
#include "spde/rng.hpp"

namespace spde {

// ---------------------------------------------------------------------------
// Coefficients

Coefficient Coefficient::zero() { return {}; }

Coefficient Coefficient::constant(double value) {
  Coefficient f;
  f.kind = Kind::constant;
  f.c = value;
  return f;
}

Coefficient Coefficient::linear(double slope, double offset) {
  Coefficient f;
  f.kind = Kind::linear;
  f.a = slope;
  f.c = offset;
  return f;
}

Coefficient Coefficient::sine(double amplitude, double frequency, double offset) {
  Coefficient f;
  f.kind = Kind::sine;
  f.a = amplitude;
  f.omega = frequency;
  f.c = offset;
  return f;
}

Coefficient Coefficient::tanh(double amplitude, double frequency, double offset) {
  Coefficient f;
  f.kind = Kind::tanh;
  f.a = amplitude;
  f.omega = frequency;
  f.c = offset;
  return f;
}

double Coefficient::operator()(double u) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::constant:
      return c;
    case Kind::linear:
      return a * u + c;
    case Kind::sine:
      return a * std::sin(omega * u) + c;
    case Kind::tanh:
      return a * std::tanh(omega * u) + c;
  }
  return 0.0;
}

double Coefficient::lipschitz() const {
  if (declared_lipschitz) return *declared_lipschitz;
  switch (kind) {
    case Kind::zero:
    case Kind::constant:
      return 0.0;
    case Kind::linear:
      return std::abs(a);
    case Kind::sine:
    case Kind::tanh:
      return std::abs(a * omega);
  }
  return 0.0;
}

bool Coefficient::is_zero() const {
  switch (kind) {
    case Kind::zero:
      return true;
    case Kind::constant:
      return c == 0.0;
    case Kind::linear:
      return a == 0.0 && c == 0.0;
    case Kind::sine:
    case Kind::tanh:
      return (a == 0.0 || omega == 0.0) && c == 0.0;
  }
  return false;
}

bool Coefficient::is_constant() const {
  switch (kind) {
    case Kind::zero:
    case Kind::constant:
      return true;
    case Kind::linear:
      return a == 0.0;
    case Kind::sine:
    case Kind::tanh:
      return a == 0.0 || omega == 0.0;
  }
  return false;
}

std::string Coefficient::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::zero:
      os << "0";
      break;
    case Kind::constant:
      os << c;
      break;
    case Kind::linear:
      os << a << "*u + " << c;
      break;
    case Kind::sine:
      os << a << "*sin(" << omega << "*u) + " << c;
      break;
    case Kind::tanh:
      os << a << "*tanh(" << omega << "*u) + " << c;
      break;
  }
  return os.str();
}

std::string to_string(Coefficient::Kind kind) {
  switch (kind) {
    case Coefficient::Kind::zero:
      return "zero";
    case Coefficient::Kind::constant:
      return "constant";
    case Coefficient::Kind::linear:
      return "linear";
    case Coefficient::Kind::sine:
      return "sine";
    case Coefficient::Kind::tanh:
      return "tanh";
  }
  return "unknown";
}

Coefficient::Kind coefficient_kind_from_string(const std::string& name) {
  if (name == "zero") return Coefficient::Kind::zero;
  if (name == "constant") return Coefficient::Kind::constant;
  if (name == "linear") return Coefficient::Kind::linear;
  if (name == "sine" || name == "sin") return Coefficient::Kind::sine;
  if (name == "tanh") return Coefficient::Kind::tanh;
  throw PreconditionError("unknown coefficient kind '" + name + "'");
}

double sampled_lipschitz(const Coefficient& f, std::uint64_t seed, double range) {
  const Philox rng(seed);
  double worst = 0.0;
  for (std::uint32_t i = 0; i < 1000; ++i) {
    const auto w = rng(make_counter(i, 0, 0, StreamTag::lipschitz));
    const double x = range * (2.0 * Philox::to_unit(w[0], w[1]) - 1.0);
    const double y = range * (2.0 * Philox::to_unit(w[2], w[3]) - 1.0);
    if (x == y) continue;
    worst = std::max(worst, std::abs(f(x) - f(y)) / std::abs(x - y));
  }
  return worst;
}

void validate_lipschitz(const Coefficient& f, const std::string& name, std::uint64_t seed) {
  const double declared = f.lipschitz();
  require(declared >= 0.0, name + ": Lipschitz constant must be non-negative");
  const double measured = sampled_lipschitz(f, seed);
  if (measured > declared * (1.0 + 1e-9) + 1e-300) {
    std::ostringstream os;
    os << name << " = " << f.describe() << " has sampled Lipschitz ratio " << measured
       << " above the declared constant " << declared;
    throw PreconditionError(os.str());
  }
}

// ---------------------------------------------------------------------------
// Semigroup and Picard map

std::vector<double> semigroup_apply(const DominatingKernel& kernel, double t, std::span<const double> field,
                                    const Grid& grid) {
  require(t >= 0.0, "semigroup time must be non-negative");
  require(field.size() == grid.size(), "field size does not match grid");
  std::vector<double> out(field.begin(), field.end());
  if (t == 0.0) return out;
  const auto& symbol = kernel.symbol();
  require(symbol.dim() == grid.dim(), "kernel and grid dimensions differ");
  RealFft fft(grid);
  std::vector<Complex> spectrum(grid.spectral_size());
  fft.forward(field, spectrum);
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= kernel.fourier(t, grid.frequency_norm(k));
  fft.inverse(spectrum, out);
  return out;
}

PicardScheme::PicardScheme(const Problem& problem)
    : grid_(problem.grid), b_(problem.b), sigma_(problem.sigma), fft_(problem.grid) {
  const auto& kernel = problem.kernel;
  require(kernel.symbol().dim() == grid_.dim(), "kernel and grid dimensions differ");
  const std::size_t spectral = grid_.spectral_size();
  const std::size_t steps = grid_.steps();
  const std::size_t n = grid_.size();

  propagator_.assign((steps + 1) * spectral, 1.0);
  for (std::size_t lag = 1; lag <= steps; ++lag) {
    for (std::size_t k = 0; k < spectral; ++k) {
      propagator_[lag * spectral + k] = kernel.fourier(grid_.time(lag), grid_.frequency_norm(k));
    }
  }
  u0_samples_ = problem.u0.sample(grid_);
  u0_hat_.resize(spectral);
  fft_.forward(u0_samples_, u0_hat_);

  initial_.resize((steps + 1) * n);
  std::copy(u0_samples_.begin(), u0_samples_.end(), initial_.begin());
  std::vector<Complex> work(spectral);
  for (std::size_t j = 1; j <= steps; ++j) {
    for (std::size_t k = 0; k < spectral; ++k) work[k] = propagator_[j * spectral + k] * u0_hat_[k];
    fft_.inverse(work, std::span<double>(initial_.data() + j * n, n));
  }
}

void PicardScheme::step(std::span<const double> u, std::span<const double> noise, std::span<double> out,
                        int iterate) const {
  const std::size_t steps = grid_.steps();
  const std::size_t n = grid_.size();
  const std::size_t spectral = grid_.spectral_size();
  require(u.size() == (steps + 1) * n && out.size() == (steps + 1) * n, "iterate size does not match grid");
  const bool drift = !b_.is_zero();
  const bool diffusion = !sigma_.is_zero();
  require(!diffusion || noise.size() == steps * n, "noise size does not match grid");

  // Spectra of b(u(t_i)) and sigma(u(t_i)) dW_i at the left points i = 0..J-1.
  std::vector<Complex> drift_hat(drift ? steps * spectral : 0);
  std::vector<Complex> noise_hat(diffusion ? steps * spectral : 0);
  std::vector<double> buffer(n);
  for (std::size_t i = 0; i < steps; ++i) {
    const double* ui = u.data() + i * n;
    if (drift) {
      for (std::size_t m = 0; m < n; ++m) buffer[m] = b_(ui[m]);
      fft_.forward(buffer, std::span<Complex>(drift_hat.data() + i * spectral, spectral));
    }
    if (diffusion) {
      const double* dw = noise.data() + i * n;
      for (std::size_t m = 0; m < n; ++m) buffer[m] = sigma_(ui[m]) * dw[m];
      fft_.forward(buffer, std::span<Complex>(noise_hat.data() + i * spectral, spectral));
    }
  }

  std::copy(u0_samples_.begin(), u0_samples_.end(), out.begin());
  const double dt = grid_.dt();
  std::vector<Complex> acc(spectral);
  for (std::size_t j = 1; j <= steps; ++j) {
    const double* pj = propagator_.data() + j * spectral;
    for (std::size_t k = 0; k < spectral; ++k) acc[k] = pj[k] * u0_hat_[k];
    for (std::size_t i = 0; i < j; ++i) {
      if (drift) {
        const double* p = propagator_.data() + (j - i) * spectral;
        const Complex* bh = drift_hat.data() + i * spectral;
        for (std::size_t k = 0; k < spectral; ++k) acc[k] += (dt * p[k]) * bh[k];
      }
      if (diffusion) {
        const double* p = propagator_.data() + (j - 1 - i) * spectral;
        const Complex* sh = noise_hat.data() + i * spectral;
        for (std::size_t k = 0; k < spectral; ++k) acc[k] += p[k] * sh[k];
      }
    }
    fft_.inverse(acc, out.subspan(j * n, n));
  }
  for (double v : out) {
    if (!std::isfinite(v)) {
      throw NumericalBreakdown("non-finite value in Picard iterate " + std::to_string(iterate), iterate);
    }
  }
}

// ---------------------------------------------------------------------------
// Solve

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iterations:
      return "max_iterations";
    case SolveStatus::non_contraction:
      return "non_contraction";
    case SolveStatus::refused:
      return "refused";
  }
  return "unknown";
}

int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return 0;
    case SolveStatus::refused:
      return 2;
    case SolveStatus::non_contraction:
      return 3;
    case SolveStatus::max_iterations:
      return 4;
  }
  return 1;
}

namespace {

std::uint64_t fnv1a(std::span<const double> data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (double v : data) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char byte : bytes) {
      h ^= byte;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

// Per-block sums; every replica of a block is processed in order by one worker.
struct BlockSums {
  /// gap[n][j * size + m] = sum_r |u_{n+1} - u_n|^p.
  std::vector<std::vector<double>> gap;
  /// first[n][m], second[n][m]: sums of u_n(T) and u_n(T)^2.
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
  std::size_t count = 0;
};

double powp(double x, double p) { return p == 2.0 ? x * x : std::pow(x, p); }

// H_n curve from gaps summed over `count` replicas. With `pooled` the moment is
// averaged over sites (its sup over x when the law is translation invariant);
// otherwise the largest per-site estimate is taken.
std::vector<double> h_curve(const std::vector<double>& gap, std::size_t count, const Grid& grid, double p,
                            double beta, bool pooled) {
  const std::size_t n = grid.size();
  std::vector<double> curve(grid.steps() + 1);
  for (std::size_t j = 0; j <= grid.steps(); ++j) {
    double moment = 0.0;
    if (pooled) {
      for (std::size_t m = 0; m < n; ++m) moment += gap[j * n + m];
      moment /= static_cast<double>(n);
    } else {
      for (std::size_t m = 0; m < n; ++m) moment = std::max(moment, gap[j * n + m]);
    }
    curve[j] = std::pow(moment / static_cast<double>(count), 1.0 / p) * std::exp(-beta * grid.time(j));
  }
  return curve;
}

double sup_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

double default_iota(const Problem& problem) {
  // |x + y|^p <= 2^(p-1) (|x|^p + |y|^p) splits the drift and noise parts of u_{n+1} - u_n.
  return std::pow(2.0, 1.0 - 1.0 / problem.p) * (problem.b.lipschitz() + problem.sigma.lipschitz());
}

SolveResult solve(const Problem& problem, const SolveOptions& options) {
  const Grid& grid = problem.grid;
  require(problem.p >= 2.0, "moment order p must be at least 2");
  require(problem.replicas >= 1, "at least one replica is required");
  require(options.n_max >= 1, "n_max must be at least 1");
  require(options.tol >= 0.0, "tol must be non-negative");
  require(problem.kernel.dim() == grid.dim() && problem.measure.dim() == grid.dim(),
          "kernel, measure and grid dimensions differ");
  validate_lipschitz(problem.b, "b", problem.seed);
  validate_lipschitz(problem.sigma, "sigma", problem.seed);

  SolveResult result;
  result.replicas = problem.replicas;
  const auto& symbol = problem.kernel.symbol();
  const double beta_check = 2.0 * symbol.lower_bound() + 1.0;
  result.dalang = dalang_integral(symbol, problem.measure, beta_check);
  DeterministicOptions det;
  det.drift_is_zero = problem.b.is_zero();
  result.deterministic = deterministic_condition(
      problem.kernel, std::max(beta_check, minimal_beta(problem.kernel) + 1.0), det);
  const bool admissible = problem.sigma.is_zero() || result.dalang.convergent();
  if (!(admissible && result.deterministic.convergent()) && !options.force) {
    result.status = SolveStatus::refused;
    std::ostringstream os;
    os << "spectral condition " << to_string(result.dalang.status) << ", drift condition "
       << to_string(result.deterministic.status);
    result.message = os.str();
    return result;
  }

  result.iota = options.iota ? *options.iota : default_iota(problem);
  result.pooled = options.pool_sites && problem.u0.kind == InitialData::Kind::constant;
  if (options.beta) {
    result.beta = *options.beta;
    if (result.dalang.convergent() && result.beta > minimal_beta(problem.kernel)) {
      result.upsilon = upsilon_frequency(problem.kernel, problem.measure, result.beta);
      result.rate_bound = result.iota * result.upsilon;
    }
  } else if (result.dalang.convergent()) {
    const auto bound = find_contraction_beta(result.iota, problem.kernel, problem.measure, 0.5);
    result.beta = bound.beta;
    result.upsilon = bound.upsilon;
    result.rate_bound = bound.ratio;
  }

  const PicardScheme scheme(problem);
  const NoiseSampler sampler(grid, problem.measure, problem.seed, problem.zero_mode);
  const std::size_t n = grid.size();
  const std::size_t steps = grid.steps();
  const std::size_t field = (steps + 1) * n;
  const auto n_max = static_cast<std::size_t>(options.n_max);
  const std::size_t replicas = problem.replicas;
  const bool diffusion = !problem.sigma.is_zero();

  // Block count depends on M and the memory budget only, never on the worker count.
  const std::size_t block_bytes = sizeof(double) * (n_max * field + 2 * (n_max + 1) * n);
  const std::size_t by_memory = std::max<std::size_t>(1, options.memory_budget_bytes / block_bytes);
  const std::size_t blocks = std::min({replicas, std::size_t{64}, by_memory});
  result.blocks = blocks;
  std::vector<BlockSums> sums(blocks);
  if (options.record_noise_hashes) result.noise_hashes.assign(replicas, std::vector<std::uint64_t>(n_max));

  parallel_for(blocks, options.workers, [&](std::size_t b) {
    auto& s = sums[b];
    s.gap.assign(n_max, std::vector<double>(field, 0.0));
    s.first.assign(n_max + 1, std::vector<double>(n, 0.0));
    s.second.assign(n_max + 1, std::vector<double>(n, 0.0));
    std::vector<double> noise(diffusion ? steps * n : 0);
    std::vector<double> current(field);
    std::vector<double> next(field);
    const std::size_t begin = b * replicas / blocks;
    const std::size_t end = (b + 1) * replicas / blocks;
    for (std::size_t r = begin; r < end; ++r) {
      for (std::size_t i = 0; diffusion && i < steps; ++i) {
        sampler.sample(r, i, std::span<double>(noise.data() + i * n, n));
      }
      current = scheme.initial_iterate();
      auto accumulate_moments = [&](std::size_t it, const std::vector<double>& u) {
        const double* last = u.data() + steps * n;
        for (std::size_t m = 0; m < n; ++m) {
          s.first[it][m] += last[m];
          s.second[it][m] += last[m] * last[m];
        }
      };
      accumulate_moments(0, current);
      bool fixed = false;
      for (std::size_t it = 0; it < n_max; ++it) {
        if (!fixed) {
          if (options.record_noise_hashes) result.noise_hashes[r][it] = fnv1a(noise);
          scheme.step(current, noise, next, static_cast<int>(it + 1));
          bool identical = true;
          auto& gap = s.gap[it];
          for (std::size_t q = 0; q < field; ++q) {
            const double d = next[q] - current[q];
            if (d != 0.0) identical = false;
            gap[q] += powp(std::abs(d), problem.p);
          }
          // Once u_{n+1} == u_n bit for bit, every later iterate repeats it.
          fixed = identical;
          std::swap(current, next);
        } else if (options.record_noise_hashes) {
          result.noise_hashes[r][it] = fnv1a(noise);
        }
        accumulate_moments(it + 1, current);
      }
      ++s.count;
    }
  });

  // Deterministic reduction in block order.
  BlockSums total;
  total.gap.assign(n_max, std::vector<double>(field, 0.0));
  total.first.assign(n_max + 1, std::vector<double>(n, 0.0));
  total.second.assign(n_max + 1, std::vector<double>(n, 0.0));
  for (const auto& s : sums) {
    for (std::size_t it = 0; it < n_max; ++it) {
      for (std::size_t q = 0; q < field; ++q) total.gap[it][q] += s.gap[it][q];
    }
    for (std::size_t it = 0; it <= n_max; ++it) {
      for (std::size_t m = 0; m < n; ++m) {
        total.first[it][m] += s.first[it][m];
        total.second[it][m] += s.second[it][m];
      }
    }
    total.count += s.count;
  }

  result.iterates = options.n_max;
  const double count = static_cast<double>(total.count);
  for (std::size_t it = 0; it < n_max; ++it) {
    result.H.push_back(h_curve(total.gap[it], total.count, grid, problem.p, result.beta, result.pooled));
    result.sup_H.push_back(sup_of(result.H.back()));
  }
  for (std::size_t it = 0; it <= n_max; ++it) {
    std::vector<double> mean(n), second(n);
    for (std::size_t m = 0; m < n; ++m) {
      mean[m] = total.first[it][m] / count;
      second[m] = total.second[it][m] / count;
    }
    result.mean.push_back(std::move(mean));
    result.second_moment.push_back(std::move(second));
  }

  // Block bootstrap of the ratios sup H_n / sup H_{n-1}.
  const auto resamples = static_cast<std::size_t>(std::max(0, options.bootstrap_resamples));
  std::vector<std::vector<double>> boot(n_max > 1 ? n_max - 1 : 0, std::vector<double>(resamples));
  if (n_max > 1 && resamples > 0) {
    const Philox rng(problem.seed);
    parallel_for(resamples, options.workers, [&](std::size_t rep) {
      std::vector<std::size_t> multiplicity(blocks, 0);
      for (std::size_t k = 0; k < blocks; k += 2) {
        const auto w = rng(make_counter(k / 2, rep, 0, StreamTag::bootstrap));
        multiplicity[static_cast<std::size_t>(Philox::to_unit(w[0], w[1]) * static_cast<double>(blocks))]++;
        if (k + 1 < blocks) {
          multiplicity[static_cast<std::size_t>(Philox::to_unit(w[2], w[3]) * static_cast<double>(blocks))]++;
        }
      }
      std::size_t resampled_count = 0;
      for (std::size_t b = 0; b < blocks; ++b) resampled_count += multiplicity[b] * sums[b].count;
      std::vector<double> sup(n_max);
      std::vector<double> gap(field);
      for (std::size_t it = 0; it < n_max; ++it) {
        std::fill(gap.begin(), gap.end(), 0.0);
        for (std::size_t b = 0; b < blocks; ++b) {
          if (multiplicity[b] == 0) continue;
          const double w = static_cast<double>(multiplicity[b]);
          for (std::size_t q = 0; q < field; ++q) gap[q] += w * sums[b].gap[it][q];
        }
        sup[it] = sup_of(h_curve(gap, resampled_count, grid, problem.p, result.beta, result.pooled));
      }
      for (std::size_t it = 1; it < n_max; ++it) {
        boot[it - 1][rep] = sup[it - 1] > 0.0 ? sup[it] / sup[it - 1] : 0.0;
      }
    });
  }
  for (std::size_t it = 1; it < n_max; ++it) {
    RatioEstimate e;
    e.n = static_cast<int>(it);
    e.ratio = result.sup_H[it - 1] > 0.0 ? result.sup_H[it] / result.sup_H[it - 1] : 0.0;
    e.ci_low = e.ci_high = e.ratio;
    if (resamples > 0) {
      auto sample = boot[it - 1];
      std::sort(sample.begin(), sample.end());
      const auto at = [&](double q) {
        return sample[std::min(sample.size() - 1, static_cast<std::size_t>(q * static_cast<double>(sample.size())))];
      };
      e.ci_low = at(0.025);
      e.ci_high = at(0.975);
    }
    e.reliable = replicas >= 100;
    result.ratios.push_back(e);
  }

  for (std::size_t it = 0; it < n_max; ++it) {
    if (result.sup_H[it] <= options.tol) {
      result.stop_iterate = static_cast<int>(it);
      break;
    }
  }
  int run = 0;
  bool non_contraction = false;
  for (const auto& e : result.ratios) {
    run = (e.ratio > 1.0 && e.ci_low > 1.0) ? run + 1 : 0;
    if (run >= 3) non_contraction = true;
  }
  if (non_contraction) {
    result.status = SolveStatus::non_contraction;
    result.message = "sup H_n grew for three consecutive iterates with confidence intervals above 1";
  } else if (result.stop_iterate >= 0) {
    result.status = SolveStatus::converged;
    result.message = "sup_t H_" + std::to_string(result.stop_iterate) + " <= tol";
  } else {
    result.status = SolveStatus::max_iterations;
    result.message = "tolerance not reached within n_max iterates";
  }
  return result;
}

}  // namespace spde
