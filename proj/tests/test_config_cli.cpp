#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "spde/cli.hpp"
#include "spde/config.hpp"
#include "spde/errors.hpp"

using namespace spde;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("spdekit_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_in(const std::string& subcommand, const Config& config, const fs::path& dir, unsigned workers = 1) {
  RunRequest request;
  request.subcommand = subcommand;
  request.config = config;
  request.out_dir = dir.string();
  request.workers = workers;
  std::ostringstream out, err;
  const int code = run(request, out, err);
  return {code, out.str(), err.str()};
}

Config heat_white(int dim) {
  return Config::from_text("dim = " + std::to_string(dim) + "\nkernel.family = heat\ncovariance.family = white\n");
}

Config small_simulation() {
  return Config::from_text(R"(
# Anderson model on a coarse grid
dim = 1
seed = 31
kernel.family = heat
covariance.family = white
grid.L = 8
grid.N = 16
grid.dt = 0.0625
grid.steps = 16
solver.sigma.kind = linear
solver.sigma.a = 1
solver.b.kind = sine
solver.b.a = 0.5
solver.u0.kind = cosine
solver.replicas = 40
solver.n_max = 3
solver.tol = 0
)");
}

}  // namespace

TEST(Config, ParsesCommentsAndOverrides) {
  auto c = Config::from_text("dim = 2   # plane\n\n# full line\nkernel.family = heat\ndim = 3\n");
  EXPECT_EQ(c.get_int("dim", 0), 3);
  EXPECT_EQ(c.get_string("kernel.family", ""), "heat");
  c.assign("kernel.family=fractional");
  EXPECT_EQ(c.get_string("kernel.family", ""), "fractional");
  EXPECT_EQ(c.get_double("grid.L", 7.5), 7.5);
}

TEST(Config, SchemaErrorsCarryKeyPath) {
  try {
    Config::from_text("kernel.familly = heat\n");
    FAIL() << "unknown key accepted";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path(), "kernel.familly");
  }
  EXPECT_THROW(Config::from_text("grid.L = wide\n"), ConfigError);
  EXPECT_THROW(Config::from_text("kernel.family = wave\n"), ConfigError);
  EXPECT_THROW(Config::from_text("grid.N = 3.5\n"), ConfigError);
  Config c;
  EXPECT_THROW(c.assign("no equals sign"), ConfigError);
}

TEST(Config, InfinityAndAuto) {
  const auto c = Config::from_text("check.horizon = inf\nsolver.beta = auto\n");
  const auto h = c.get_optional_double("check.horizon");
  ASSERT_TRUE(h.has_value());
  EXPECT_TRUE(std::isinf(*h));
}

TEST(Config, CanonicalHashIgnoresOrder) {
  const auto a = Config::from_text("dim = 1\nseed = 4\n");
  const auto b = Config::from_text("seed = 4\ndim = 1\n");
  EXPECT_EQ(a.canonical(), "dim=1\nseed=4\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash(), fnv1a64(a.canonical()));
  EXPECT_NE(a.hash(), Config::from_text("dim = 1\nseed = 5\n").hash());
  EXPECT_EQ(a.hash_hex().size(), 16u);
}

TEST(Config, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Config, SeedRequiredForStochasticRuns) {
  auto c = small_simulation();
  c.erase("seed");
  EXPECT_THROW(c.get_seed(), ConfigError);
  const auto r = run_in("simulate", c, fresh_dir("noseed"));
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
}

TEST(Cli, CheckHeatLineWhiteNoise) {
  auto c = heat_white(1);
  c.set("check.beta", "2");
  const auto dir = fresh_dir("check1");
  const auto r = run_in("check", c, dir);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto m = manifest(dir);
  EXPECT_EQ(m["results"]["dalang"]["status"], "convergent");
  EXPECT_NEAR(m["results"]["dalang"]["value"].get<double>(), 0.25, 1e-6);
  EXPECT_EQ(m["config_hash"], c.hash_hex());
  EXPECT_TRUE(fs::exists(dir / "refinement.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
}

TEST(Cli, CheckHeatPlaneWhiteNoiseDiverges) {
  const auto dir = fresh_dir("check2");
  const auto r = run_in("check", heat_white(2), dir);
  EXPECT_EQ(r.code, kExitDivergent);
  EXPECT_EQ(manifest(dir)["results"]["dalang"]["status"], "divergent");
}

TEST(Cli, ConfigErrorExitCode) {
  auto c = heat_white(1);
  c.set("dim", "4");
  const auto r = run_in("check", c, fresh_dir("dim4"));
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("dim"), std::string::npos);
}

TEST(Cli, GalleryPasses) {
  const auto dir = fresh_dir("gallery");
  const auto r = run_in("gallery", Config{}, dir);
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_TRUE(manifest(dir)["results"]["all_pass"].get<bool>());
  for (const auto& row : golden_gallery()) EXPECT_TRUE(row.pass()) << row.name;
}

TEST(Cli, SimulateOutputsIndependentOfWorkers) {
  const auto one = fresh_dir("sim_w1");
  const auto two = fresh_dir("sim_w2");
  ASSERT_EQ(run_in("simulate", small_simulation(), one, 1).code, kExitInconclusive);
  ASSERT_EQ(run_in("simulate", small_simulation(), two, 2).code, kExitInconclusive);
  for (const char* file : {"H.csv", "ratios.csv", "moments.csv", "manifest.json"}) {
    EXPECT_EQ(slurp(one / file), slurp(two / file)) << file;
  }
}

TEST(Cli, ManifestReplayReproducesRun) {
  const auto first = fresh_dir("replay_a");
  const auto second = fresh_dir("replay_b");
  ASSERT_EQ(run_in("simulate", small_simulation(), first).code, kExitInconclusive);
  const auto replayed = Config::from_file((first / "manifest.json").string());
  ASSERT_TRUE(replayed.subcommand().has_value());
  EXPECT_EQ(*replayed.subcommand(), "simulate");
  EXPECT_EQ(replayed.hash(), small_simulation().hash());
  ASSERT_EQ(run_in("simulate", replayed, second).code, kExitInconclusive);
  EXPECT_EQ(slurp(first / "H.csv"), slurp(second / "H.csv"));
  EXPECT_EQ(slurp(first / "manifest.json"), slurp(second / "manifest.json"));
}

TEST(Cli, NoiseValidationRun) {
  auto c = heat_white(1);
  c.set("seed", "8");
  c.set("grid.N", "64");
  c.set("noise.mode", "validate");
  c.set("noise.replicas", "2000");
  const auto dir = fresh_dir("noise");
  const auto r = run_in("noise", c, dir);
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_TRUE(manifest(dir)["results"]["passed"].get<bool>());
}
