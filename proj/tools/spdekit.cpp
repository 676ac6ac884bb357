#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "spde/cli.hpp"
#include "spde/errors.hpp"

namespace {

struct Options {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out_dir;
  unsigned workers = 0;
  std::string kernel, covariance, beta, horizon, generalized, seed;
  int dim = 0;
  bool beta_search = false;
  bool validate = false;
  bool force = false;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("-c,--config", o.config_file, "key = value file or a manifest.json to replay");
  app->add_option("-s,--set", o.overrides, "override as key=value (repeatable)");
  app->add_option("-o,--out", o.out_dir, "output directory (default $SPDEKIT_OUTPUT_DIR or ./spdekit-out)");
  app->add_option("-j,--workers", o.workers, "worker threads (0 = hardware concurrency)");
  app->add_option("--kernel", o.kernel, "kernel.family");
  app->add_option("--dim", o.dim, "dim");
  app->add_option("--covariance", o.covariance, "covariance.family");
  app->add_option("--seed", o.seed, "seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Well-posedness checks, noise synthesis and Picard simulation for SPDEs"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "evaluate the integrability conditions");
  add_common(check, o);
  check->add_option("--beta", o.beta, "check.beta");
  check->add_flag("--beta-search", o.beta_search, "find the smallest beta with iota * Upsilon <= target");
  check->add_option("--horizon", o.horizon, "check.horizon (number or inf)");
  check->add_option("--generalized", o.generalized, "check.generalized: off, wave, symbol, one");
  check->add_flag("--report", "verdict JSON and CSV trace are always written; accepted for compatibility");

  auto* kernel = app.add_subcommand("kernel", "evaluate and export a kernel");
  add_common(kernel, o);

  auto* noise = app.add_subcommand("noise", "sample or validate the noise");
  add_common(noise, o);
  noise->add_flag("--validate", o.validate, "run the covariance validation");

  auto* simulate = app.add_subcommand("simulate", "run the Picard iteration");
  add_common(simulate, o);
  simulate->add_flag("--force", o.force, "run even when a condition is not convergent");

  auto* gallery = app.add_subcommand("gallery", "run the golden verdict table");
  add_common(gallery, o);

  CLI11_PARSE(app, argc, argv);

  spde::RunRequest request;
  request.subcommand = app.get_subcommands().front()->get_name();
  request.out_dir = o.out_dir;
  request.workers = o.workers;
  try {
    if (!o.config_file.empty()) {
      request.config = spde::Config::from_file(o.config_file);
      const auto& recorded = request.config.subcommand();
      if (recorded && *recorded != request.subcommand) {
        std::cerr << "config error at subcommand: manifest was written by '" << *recorded << "'\n";
        return spde::kExitConfig;
      }
    }
    auto& c = request.config;
    if (!o.kernel.empty()) c.set("kernel.family", o.kernel);
    if (o.dim != 0) c.set("dim", std::to_string(o.dim));
    if (!o.covariance.empty()) c.set("covariance.family", o.covariance);
    if (!o.seed.empty()) c.set("seed", o.seed);
    if (!o.beta.empty()) c.set("check.beta", o.beta);
    if (o.beta_search) c.set("check.beta_search", "true");
    if (!o.horizon.empty()) c.set("check.horizon", o.horizon);
    if (!o.generalized.empty()) c.set("check.generalized", o.generalized);
    if (o.validate) c.set("noise.mode", "validate");
    if (o.force) c.set("solver.force", "true");
    for (const auto& kv : o.overrides) c.assign(kv);
  } catch (const spde::ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return spde::kExitConfig;
  }
  return spde::run(request, std::cout, std::cerr);
}
