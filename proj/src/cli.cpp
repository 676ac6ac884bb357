#include "spde/cli.hpp"

#include <fftw3.h>

#include <boost/version.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "spde/errors.hpp"
#include "spde/noise.hpp"
#include "spde/wellposedness.hpp"

namespace spde {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Output helpers

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt(values[i]);
    out_ << "\n";
  }
  void row(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

json verdict_json(const ConditionVerdict& v) {
  json j;
  j["status"] = to_string(v.status);
  j["value"] = num(v.value);
  j["beta"] = num(v.beta);
  j["tail_estimate"] = num(v.tail_estimate);
  j["doublings"] = v.radii.empty() ? 0 : v.radii.size() - 1;
  if (!v.radii.empty()) j["final_radius"] = num(v.radii.back());
  j["note"] = v.note;
  return j;
}

void write_trace(const fs::path& path, const std::string& label, const ConditionVerdict& v) {
  CsvWriter csv(path, {"condition", "radius", "partial"});
  for (std::size_t i = 0; i < v.radii.size() && i < v.refinement_trace.size(); ++i) {
    csv.row(std::vector<std::string>{label, fmt(v.radii[i]), fmt(v.refinement_trace[i])});
  }
}

std::vector<std::string> coordinate_header(int dim) {
  static const char* names[] = {"x", "y", "z"};
  std::vector<std::string> h;
  for (int a = 0; a < dim; ++a) h.push_back(names[a]);
  return h;
}

void append_coordinates(std::vector<double>& row, const Grid& grid, std::size_t site) {
  const auto x = grid.coordinate(site);
  for (int a = 0; a < grid.dim(); ++a) row.push_back(x[static_cast<std::size_t>(a)]);
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::convergent:
      return kExitOk;
    case Verdict::divergent:
      return kExitDivergent;
    case Verdict::inconclusive:
      return kExitInconclusive;
  }
  return kExitError;
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::divergent || b == Verdict::divergent) return Verdict::divergent;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::convergent;
}

json manifest_base(const RunRequest& request) {
  json m;
  m["tool"] = "spdekit";
  m["version"] = kToolVersion;
  m["libraries"] = {{"fftw", std::string(fftw_version)}, {"boost", std::string(BOOST_LIB_VERSION)}};
  m["subcommand"] = request.subcommand;
  json cfg = json::object();
  for (const auto& [k, v] : request.config.values()) cfg[k] = v;
  m["config"] = cfg;
  m["config_hash"] = request.config.hash_hex();
  return m;
}

void write_manifest(const fs::path& dir, const json& manifest) {
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Subcommands

int run_check(const RunRequest& request, const fs::path& dir, std::ostream& out) {
  const Config& c = request.config;
  const auto kernel = kernel_from_config(c);
  const auto measure = measure_from_config(c);
  const double beta = c.get_double("check.beta", minimal_beta(kernel) + 1.0);
  QuadratureSettings settings;
  settings.rel_tol = c.get_double("check.rel_tol", settings.rel_tol);

  json results;
  std::ostringstream summary;
  summary << "kernel      " << kernel.description() << "\n";
  summary << "covariance  " << measure.description() << "\n";
  summary << "beta        " << fmt(beta) << "\n";

  const std::string generalized = c.get_string("check.generalized", "off");
  const auto horizon = c.get_optional_double("check.horizon");

  ConditionVerdict spectral;
  std::string spectral_label = "dalang";
  if (generalized != "off") {
    FourierKernelFn ghat;
    if (generalized == "wave") {
      ghat = wave_fourier_kernel();
    } else if (generalized == "one") {
      ghat = [](double, double) { return 1.0; };
    } else {
      ghat = [&kernel](double s, double r) { return kernel.fourier(s, r); };
    }
    const double t = horizon ? *horizon : 1.0;
    GeneralizedOptions gopts;
    gopts.rel_tol = c.get_double("check.rel_tol", gopts.rel_tol);
    spectral = generalized_condition(ghat, measure, c.get_double("check.beta", 0.0), t, gopts);
    spectral_label = "generalized_" + generalized;
  } else if (kernel.has_symbol()) {
    spectral = dalang_integral(kernel.symbol(), measure, beta, settings);
  } else {
    spectral.beta = beta;
    spectral.note = "no Fourier symbol for " + kernel.description();
  }
  results[spectral_label] = verdict_json(spectral);
  summary << spectral_label << "      " << to_string(spectral.status) << "  value " << fmt(spectral.value) << "\n";

  DeterministicOptions det;
  det.drift_is_zero = c.get_bool("check.b_zero", false);
  if (horizon && std::isfinite(*horizon)) det.horizon = *horizon;
  const auto deterministic = deterministic_condition(kernel, beta, det, settings);
  results["deterministic"] = verdict_json(deterministic);
  summary << "deterministic  " << to_string(deterministic.status) << "  value " << fmt(deterministic.value)
          << "\n";

  const Verdict overall = combine(spectral.status, deterministic.status);
  results["overall"] = to_string(overall);

  if (c.get_bool("check.beta_search", false) && spectral.convergent() && kernel.has_symbol() &&
      generalized == "off") {
    const double iota = c.get_double("check.iota", 1.0);
    const double target = c.get_double("check.target", 0.5);
    const auto bound = find_contraction_beta(iota, kernel, measure, target);
    results["beta_search"] = {{"iota", num(iota)},
                              {"target", num(target)},
                              {"beta", num(bound.beta)},
                              {"upsilon", num(bound.upsilon)},
                              {"ratio", num(bound.ratio)}};
    summary << "beta*       " << fmt(bound.beta) << "  (iota * Upsilon = " << fmt(bound.ratio) << ")\n";
  }
  summary << "overall     " << to_string(overall) << "\n";

  write_trace(dir / "refinement.csv", spectral_label, spectral);
  auto manifest = manifest_base(request);
  manifest["results"] = results;
  write_manifest(dir, manifest);
  write_text(dir / "summary.txt", summary.str());
  out << summary.str();
  return verdict_exit(overall);
}

int run_kernel(const RunRequest& request, const fs::path& dir, std::ostream& out) {
  const Config& c = request.config;
  const auto kernel = kernel_from_config(c);
  const auto grid = grid_from_config(c);
  require(grid.dim() == kernel.dim(), "grid and kernel dimensions differ");
  const double s = c.get_double("kernel.time", 1.0);
  require(s > 0.0, "kernel.time must be positive");

  std::vector<double> closed(grid.size(), std::nan(""));
  if (kernel.has_real_eval()) {
    for (std::size_t m = 0; m < grid.size(); ++m) {
      const auto x = grid.coordinate(m);
      closed[m] = kernel.eval_real(s, std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim())));
    }
  }
  std::vector<double> spectral(grid.size(), std::nan(""));
  std::string spectral_note = "ok";
  if (kernel.has_symbol()) {
    try {
      spectral = kernel_realspace(kernel.symbol(), s, grid, kernel.fourier_amplitude());
    } catch (const ResolutionError& e) {
      spectral_note = e.what();
    }
  } else {
    spectral_note = "no Fourier symbol";
  }
  auto header = coordinate_header(grid.dim());
  header.push_back("closed_form");
  header.push_back("spectral");
  CsvWriter csv(dir / "kernel_field.csv", header);
  double closed_mass = 0.0;
  double spectral_mass = 0.0;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    std::vector<double> row;
    append_coordinates(row, grid, m);
    row.push_back(closed[m]);
    row.push_back(spectral[m]);
    csv.row(row);
    closed_mass += closed[m] * grid.cell_volume();
    spectral_mass += spectral[m] * grid.cell_volume();
  }
  if (kernel.has_symbol()) {
    CsvWriter sym(dir / "symbol.csv", {"radius", "symbol"});
    for (int e = -30; e <= 30; ++e) {
      const double r = std::pow(10.0, 0.1 * e);
      sym.row(std::vector<double>{r, kernel.symbol().at_radius(r)});
    }
  }
  json results;
  results["time"] = num(s);
  results["l1_law"] = num(kernel.l1_norm(s));
  results["grid_mass_closed_form"] = num(closed_mass);
  results["grid_mass_spectral"] = num(spectral_mass);
  results["spectral_note"] = spectral_note;
  auto manifest = manifest_base(request);
  manifest["results"] = results;
  write_manifest(dir, manifest);
  std::ostringstream summary;
  summary << "kernel        " << kernel.description() << "\n"
          << "time          " << fmt(s) << "\n"
          << "l1 law        " << fmt(kernel.l1_norm(s)) << "\n"
          << "grid mass     closed form " << fmt(closed_mass) << ", spectral " << fmt(spectral_mass) << "\n"
          << "spectral      " << spectral_note << "\n";
  write_text(dir / "summary.txt", summary.str());
  out << summary.str();
  return kExitOk;
}

int run_noise(const RunRequest& request, const fs::path& dir, std::ostream& out) {
  const Config& c = request.config;
  const auto measure = measure_from_config(c);
  const auto grid = grid_from_config(c);
  const auto seed = c.get_seed();
  const auto zero = zero_mode_from_string(c.get_string("noise.zero_mode", "cell_average"));
  const NoiseSampler sampler(grid, measure, seed, zero);
  const std::string mode = c.get_string("noise.mode", "sample");
  std::ostringstream summary;
  summary << "covariance     " << measure.description() << "\n"
          << "site variance  " << fmt(sampler.site_variance()) << "\n";
  json results;
  results["site_variance"] = num(sampler.site_variance());
  int code = kExitOk;

  if (mode == "sample") {
    const auto field = sampler.sample(0, 0);
    auto header = coordinate_header(grid.dim());
    header.push_back("increment");
    CsvWriter csv(dir / "noise_field.csv", header);
    for (std::size_t m = 0; m < grid.size(); ++m) {
      std::vector<double> row;
      append_coordinates(row, grid, m);
      row.push_back(field[m]);
      csv.row(row);
    }
  } else {
    const auto replicas = static_cast<std::size_t>(c.get_int("noise.replicas", 10000));
    const auto v = validate_noise(sampler, replicas, request.workers);
    results["variance_z"] = num(v.variance_z);
    results["cross_cov_z"] = num(v.cross_cov_z);
    results["stationarity_max_dev"] = num(v.stationarity_max_dev);
    results["stationarity_lag"] = v.stationarity_lag;
    results["empirical_variance"] = num(v.empirical_variance);
    results["replicas"] = replicas;
    bool passed = v.passed();
    summary << "variance z     " << fmt(v.variance_z) << "\n"
            << "cross-cov z    " << fmt(v.cross_cov_z) << "\n"
            << "stationarity   " << fmt(v.stationarity_max_dev) << " (max |z|, lag " << v.stationarity_lag << ")\n";
    const auto iso_replicas = static_cast<std::size_t>(c.get_int("noise.isometry_replicas", 0));
    if (iso_replicas > 0) {
      // Gaussian bump in space, constant over the time steps.
      const auto bump = InitialData::gaussian(1.0, grid.length() / 16.0).sample(grid);
      SpaceTimeField x;
      for (std::size_t i = 0; i < grid.steps(); ++i) x.insert(x.end(), bump.begin(), bump.end());
      const auto iso = isometry_check(x, measure, grid, iso_replicas, seed, zero, request.workers);
      results["isometry"] = {{"replicas", iso_replicas},
                             {"empirical", num(iso.empirical)},
                             {"exact", num(iso.exact)},
                             {"z", num(iso.z)}};
      summary << "isometry z     " << fmt(iso.z) << "\n";
      passed = passed && std::abs(iso.z) <= 3.0;
    }
    json validation = {{"variance_z", num(v.variance_z)},
                       {"cross_cov_z", num(v.cross_cov_z)},
                       {"stationarity_max_dev", num(v.stationarity_max_dev)}};
    write_text(dir / "validation.json", validation.dump(2) + "\n");
    results["passed"] = passed;
    summary << "validation     " << (passed ? "passed" : "FAILED") << "\n";
    if (!passed) code = kExitNoiseValidation;
  }
  auto manifest = manifest_base(request);
  manifest["results"] = results;
  write_manifest(dir, manifest);
  write_text(dir / "summary.txt", summary.str());
  out << summary.str();
  return code;
}

int run_simulate(const RunRequest& request, const fs::path& dir, std::ostream& out) {
  const Config& c = request.config;
  const auto problem = problem_from_config(c);
  auto options = solve_options_from_config(c);
  options.workers = request.workers;
  const auto result = solve(problem, options);

  json results;
  results["status"] = to_string(result.status);
  results["message"] = result.message;
  results["verdicts"] = {{"dalang", verdict_json(result.dalang)},
                         {"deterministic", verdict_json(result.deterministic)}};
  std::ostringstream summary;
  summary << "kernel      " << problem.kernel.description() << "\n"
          << "covariance  " << problem.measure.description() << "\n"
          << "b           " << problem.b.describe() << "\n"
          << "sigma       " << problem.sigma.describe() << "\n"
          << "u0          " << problem.u0.describe() << "\n"
          << "verdicts    dalang " << to_string(result.dalang.status) << ", deterministic "
          << to_string(result.deterministic.status) << "\n";

  if (result.status != SolveStatus::refused) {
    results["beta"] = num(result.beta);
    results["iota"] = num(result.iota);
    results["upsilon"] = num(result.upsilon);
    results["rate_bound"] = num(result.rate_bound);
    results["pooled_sites"] = result.pooled;
    results["replicas"] = result.replicas;
    results["blocks"] = result.blocks;
    results["iterates"] = result.iterates;
    results["stop_iterate"] = result.stop_iterate;
    results["solution_iterate"] = result.solution_iterate();
    json sup = json::array();
    for (double v : result.sup_H) sup.push_back(num(v));
    results["sup_H"] = sup;
    json ratios = json::array();
    for (const auto& e : result.ratios) {
      ratios.push_back({{"n", e.n},
                        {"ratio", num(e.ratio)},
                        {"ci_low", num(e.ci_low)},
                        {"ci_high", num(e.ci_high)},
                        {"reliable", e.reliable}});
    }
    results["ratios"] = ratios;

    const Grid& grid = problem.grid;
    CsvWriter h(dir / "H.csv", {"n", "t", "H"});
    for (std::size_t n = 0; n < result.H.size(); ++n) {
      for (std::size_t j = 0; j < result.H[n].size(); ++j) {
        h.row(std::vector<double>{static_cast<double>(n), grid.time(j), result.H[n][j]});
      }
    }
    CsvWriter r(dir / "ratios.csv", {"n", "ratio", "ci_low", "ci_high"});
    for (const auto& e : result.ratios) r.row(std::vector<double>{static_cast<double>(e.n), e.ratio, e.ci_low, e.ci_high});
    auto header = coordinate_header(grid.dim());
    header.push_back("mean");
    header.push_back("second_moment");
    CsvWriter mcsv(dir / "moments.csv", header);
    const auto it = static_cast<std::size_t>(result.solution_iterate());
    for (std::size_t m = 0; m < grid.size(); ++m) {
      std::vector<double> row;
      append_coordinates(row, grid, m);
      row.push_back(result.mean[it][m]);
      row.push_back(result.second_moment[it][m]);
      mcsv.row(row);
    }
    summary << "beta        " << fmt(result.beta) << "  (iota " << fmt(result.iota) << ", iota * Upsilon "
            << fmt(result.rate_bound) << ")\n";
    for (std::size_t n = 0; n < result.sup_H.size(); ++n) {
      summary << "sup H_" << n << "     " << fmt(result.sup_H[n]);
      if (n >= 1) {
        const auto& e = result.ratios[n - 1];
        summary << "  ratio " << fmt(e.ratio) << " [" << fmt(e.ci_low) << ", " << fmt(e.ci_high) << "]"
                << (e.reliable ? "" : " (unreliable: M < 100)");
      }
      summary << "\n";
    }
  }
  summary << "status      " << to_string(result.status) << ": " << result.message << "\n";
  auto manifest = manifest_base(request);
  manifest["seed"] = problem.seed;
  manifest["results"] = results;
  write_manifest(dir, manifest);
  write_text(dir / "summary.txt", summary.str());
  out << summary.str();
  return exit_code(result.status);
}

int run_gallery(const RunRequest& request, const fs::path& dir, std::ostream& out) {
  const auto rows = golden_gallery();
  CsvWriter csv(dir / "gallery.csv", {"row", "expected", "got", "beta", "value", "pass"});
  std::ostringstream summary;
  json table = json::array();
  bool all = true;
  for (const auto& r : rows) {
    csv.row(std::vector<std::string>{"\"" + r.name + "\"", to_string(r.expected), to_string(r.got), fmt(r.beta),
                                     fmt(r.value), r.pass() ? "pass" : "FAIL"});
    table.push_back({{"row", r.name},
                     {"expected", to_string(r.expected)},
                     {"got", to_string(r.got)},
                     {"value", num(r.value)},
                     {"pass", r.pass()}});
    char line[256];
    std::snprintf(line, sizeof(line), "%-4s %-58s expected %-12s got %s\n", r.pass() ? "ok" : "FAIL",
                  r.name.c_str(), to_string(r.expected).c_str(), to_string(r.got).c_str());
    summary << line;
    all = all && r.pass();
  }
  auto manifest = manifest_base(request);
  manifest["results"] = {{"rows", table}, {"all_pass", all}};
  write_manifest(dir, manifest);
  write_text(dir / "summary.txt", summary.str());
  out << summary.str();
  return all ? kExitOk : kExitGalleryMismatch;
}

}  // namespace

// ---------------------------------------------------------------------------
// Factories

int config_dimension(const Config& c) {
  const auto d = c.get_int("dim", 1);
  if (d < 1 || d > 3) throw ConfigError("dim", "dimension must be 1, 2 or 3");
  return static_cast<int>(d);
}

namespace {

DominatingKernel component_kernel(const std::string& family, const Config& c, int d) {
  if (family == "heat") return heat_kernel(d);
  if (family == "fractional") return fractional_heat_kernel(d, c.get_double("kernel.s_exp", 0.5), c.get_double("kernel.C", 0.0));
  throw ConfigError("kernel.components", "mixture components must be heat or fractional, got '" + family + "'");
}

}  // namespace

DominatingKernel kernel_from_config(const Config& c) {
  const int d = config_dimension(c);
  const std::string family = c.get_string("kernel.family", "heat");
  try {
    if (family == "heat") return heat_kernel(d);
    if (family == "fractional") {
      return fractional_heat_kernel(d, c.get_double("kernel.s_exp", 0.5), c.get_double("kernel.C", 0.0));
    }
    if (family == "kolmogorov") {
      if (d != 2) throw ConfigError("dim", "the Kolmogorov kernel lives on R^2 (dim = 2)");
      if (c.get_string("kernel.variant", "exact") == "euclidean_bound") {
        return kolmogorov_euclidean_bound(c.get_double("kernel.C", 10.0));
      }
      return kolmogorov_kernel();
    }
    if (family == "gaussian_bound") {
      auto weights = c.get_int_list("kernel.block_weights");
      if (weights.empty()) weights.assign(static_cast<std::size_t>(d), 1);
      if (static_cast<int>(weights.size()) != d) {
        throw ConfigError("kernel.block_weights", "needs one weight per coordinate (dim = " + std::to_string(d) + ")");
      }
      return gaussian_bound_kernel(HomogeneousNorm(weights), c.get_double("kernel.c1", 1.0),
                                   c.get_double("kernel.c2", 0.25));
    }
    std::stringstream parts(c.get_string("kernel.components", "heat,fractional"));
    std::string item;
    std::optional<DominatingKernel> acc;
    while (std::getline(parts, item, ',')) {
      auto k = component_kernel(item, c, d);
      acc = acc ? mixture_kernel(*acc, k) : k;
    }
    if (!acc) throw ConfigError("kernel.components", "mixture needs at least one component");
    return *acc;
  } catch (const PreconditionError& e) {
    throw ConfigError("kernel", e.what());
  }
}

SpectralMeasure measure_from_config(const Config& c) {
  const int d = config_dimension(c);
  const std::string family = c.get_string("covariance.family", "white");
  try {
    if (family == "white") return white_noise_measure(d);
    if (family == "riesz") return riesz_measure(d, c.get_double("covariance.lambda", 0.5));
    if (family == "sobolev") {
      return sobolev_bound_measure(d, c.get_double("covariance.k", 2.0), c.get_double("covariance.C", 1.0));
    }
    return expression_measure(d, c.get_string("covariance.expr", "gaussian"),
                              c.get_double("covariance.amplitude", 1.0), c.get_double("covariance.scale", 1.0),
                              c.get_double("covariance.exponent", 0.0),
                              c.get_optional_double("covariance.origin_exponent"),
                              c.get_optional_double("covariance.tail_exponent"));
  } catch (const PreconditionError& e) {
    throw ConfigError("covariance", e.what());
  }
}

Grid grid_from_config(const Config& c) {
  const int d = config_dimension(c);
  const auto n = c.get_int("grid.N", 128);
  const auto steps = c.get_int("grid.steps", 128);
  if (n < 2) throw ConfigError("grid.N", "needs at least 2 points");
  if (steps < 1) throw ConfigError("grid.steps", "needs at least one step");
  try {
    return Grid(d, c.get_double("grid.L", 32.0), static_cast<std::size_t>(n), c.get_double("grid.dt", 1.0 / 128.0),
                static_cast<std::size_t>(steps));
  } catch (const PreconditionError& e) {
    throw ConfigError("grid", e.what());
  }
}

namespace {

Coefficient coefficient_from_config(const Config& c, const std::string& prefix, const std::string& fallback) {
  Coefficient f;
  f.kind = coefficient_kind_from_string(c.get_string(prefix + ".kind", fallback));
  f.a = c.get_double(prefix + ".a", 1.0);
  f.c = c.get_double(prefix + ".c", f.kind == Coefficient::Kind::constant ? 1.0 : 0.0);
  f.omega = c.get_double(prefix + ".omega", 1.0);
  if (c.has(prefix + ".lipschitz")) f.declared_lipschitz = c.get_double(prefix + ".lipschitz", 0.0);
  return f;
}

}  // namespace

Problem problem_from_config(const Config& c) {
  InitialData u0;
  u0.kind = initial_kind_from_string(c.get_string("solver.u0.kind", "constant"));
  u0.amplitude = c.get_double("solver.u0.amplitude", 1.0);
  u0.width = c.get_double("solver.u0.width", 1.0);
  u0.mode = static_cast<int>(c.get_int("solver.u0.mode", 1));
  if (u0.kind == InitialData::Kind::gaussian && !(u0.width > 0.0)) {
    throw ConfigError("solver.u0.width", "must be positive");
  }
  const double p = c.get_double("solver.p", 2.0);
  if (p < 2.0) throw ConfigError("solver.p", "moment order must be at least 2");
  const auto replicas = c.get_int("solver.replicas", 100);
  if (replicas < 1) throw ConfigError("solver.replicas", "must be positive");
  Problem problem{kernel_from_config(c),
                  measure_from_config(c),
                  coefficient_from_config(c, "solver.b", "zero"),
                  coefficient_from_config(c, "solver.sigma", "linear"),
                  u0,
                  grid_from_config(c),
                  p,
                  static_cast<std::size_t>(replicas),
                  c.get_seed(),
                  zero_mode_from_string(c.get_string("noise.zero_mode", "cell_average"))};
  if (!problem.kernel.has_symbol()) {
    throw ConfigError("kernel.family", "the solver needs a kernel with a Fourier symbol");
  }
  return problem;
}

SolveOptions solve_options_from_config(const Config& c) {
  SolveOptions o;
  o.n_max = static_cast<int>(c.get_int("solver.n_max", 8));
  if (o.n_max < 1) throw ConfigError("solver.n_max", "must be at least 1");
  o.tol = c.get_double("solver.tol", 1e-6);
  o.force = c.get_bool("solver.force", false);
  o.beta = c.get_optional_double("solver.beta");
  o.iota = c.get_optional_double("solver.iota");
  o.pool_sites = c.get_bool("solver.pool_sites", true);
  return o;
}

// ---------------------------------------------------------------------------
// Gallery

std::vector<GalleryRow> golden_gallery() {
  std::vector<GalleryRow> rows;
  auto spectral_row = [&rows](const std::string& name, const DominatingKernel& k, const SpectralMeasure& m,
                              Verdict expected) {
    const double beta = 2.0 * k.symbol().lower_bound() + 1.0;
    const auto v = dalang_integral(k.symbol(), m, beta);
    rows.push_back({name, expected, v.status, beta, v.value});
  };
  for (double lambda : {0.5, 1.0, 1.5, 1.9}) {
    std::ostringstream name;
    name << "heat d=2, Riesz lambda=" << lambda;
    spectral_row(name.str(), heat_kernel(2), riesz_measure(2, lambda), Verdict::convergent);
  }
  spectral_row("heat d=3, Riesz lambda=1.9", heat_kernel(3), riesz_measure(3, 1.9), Verdict::convergent);
  spectral_row("heat d=3, Riesz lambda=2.5", heat_kernel(3), riesz_measure(3, 2.5), Verdict::divergent);
  spectral_row("heat d=1, white noise", heat_kernel(1), white_noise_measure(1), Verdict::convergent);
  spectral_row("heat d=2, white noise", heat_kernel(2), white_noise_measure(2), Verdict::divergent);
  spectral_row("heat d=3, white noise", heat_kernel(3), white_noise_measure(3), Verdict::divergent);
  spectral_row("heat n=3, Sobolev k=2", heat_kernel(3), sobolev_bound_measure(3, 2.0, 1.0), Verdict::convergent);
  spectral_row("heat n=3, Sobolev k=1.5", heat_kernel(3), sobolev_bound_measure(3, 1.5, 1.0), Verdict::convergent);
  spectral_row("heat n=3, Sobolev k=0.5", heat_kernel(3), sobolev_bound_measure(3, 0.5, 1.0), Verdict::divergent);
  spectral_row("fractional s=1 d=1, white noise", fractional_heat_kernel(1, 1.0, 0.0), white_noise_measure(1),
               Verdict::convergent);
  spectral_row("fractional s=0.5 d=1, white noise", fractional_heat_kernel(1, 0.5, 0.0), white_noise_measure(1),
               Verdict::divergent);
  spectral_row("fractional s=0.5 C=1 d=1, Riesz lambda=0.5", fractional_heat_kernel(1, 0.5, 1.0),
               riesz_measure(1, 0.5), Verdict::convergent);
  spectral_row("Kolmogorov Gaussian bound (Euclidean, C=10), Riesz lambda=1",
               gaussian_bound_kernel(HomogeneousNorm::euclidean(2), 10.0, 0.1), riesz_measure(2, 1.0),
               Verdict::convergent);
  {
    const auto k = gaussian_bound_kernel(HomogeneousNorm({1, 3}), 1.0, 0.1);
    const auto v = deterministic_condition(k, 1.0);
    rows.push_back({"Kolmogorov graded bound (weights 1,3), L1 condition", Verdict::convergent, v.status, 1.0,
                    v.value});
  }
  spectral_row("mixture heat + fractional(s=0.5) d=1, white noise",
               mixture_kernel(heat_kernel(1), fractional_heat_kernel(1, 0.5, 0.0)), white_noise_measure(1),
               Verdict::convergent);
  return rows;
}

// ---------------------------------------------------------------------------

std::string resolve_output_dir(const std::string& requested) {
  if (!requested.empty()) return requested;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "spdekit-out";
}

int run(const RunRequest& request, std::ostream& out, std::ostream& err) {
  try {
    const fs::path dir = resolve_output_dir(request.out_dir);
    fs::create_directories(dir);
    const auto& s = request.subcommand;
    if (s == "check") return run_check(request, dir, out);
    if (s == "kernel") return run_kernel(request, dir, out);
    if (s == "noise") return run_noise(request, dir, out);
    if (s == "simulate") return run_simulate(request, dir, out);
    if (s == "gallery") return run_gallery(request, dir, out);
    err << "error: unknown subcommand '" << s << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error at " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalBreakdown& e) {
    err << "numerical breakdown at iterate " << e.iterate() << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace spde
