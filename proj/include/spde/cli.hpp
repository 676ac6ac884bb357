#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spde/config.hpp"
#include "spde/covariance.hpp"
#include "spde/grid.hpp"
#include "spde/quadrature.hpp"
#include "spde/solver.hpp"
#include "spde/symbols.hpp"

namespace spde {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDivergent = 2;
inline constexpr int kExitNonContraction = 3;
inline constexpr int kExitInconclusive = 4;
inline constexpr int kExitGalleryMismatch = 5;
inline constexpr int kExitNoiseValidation = 6;
inline constexpr int kExitConfig = 64;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "SPDEKIT_OUTPUT_DIR";

struct RunRequest {
  std::string subcommand;
  Config config;
  /// Empty: $SPDEKIT_OUTPUT_DIR, then ./spdekit-out.
  std::string out_dir;
  /// Worker threads; not part of the configuration and never affects outputs.
  unsigned workers = 0;
};

/// Executes one subcommand (check, kernel, noise, simulate, gallery), writes
/// manifest.json, CSVs and summary.txt into the output directory and returns
/// the exit code. Errors are reported on `err` and mapped to exit codes.
int run(const RunRequest& request, std::ostream& out, std::ostream& err);

std::string resolve_output_dir(const std::string& requested);

int config_dimension(const Config& config);
DominatingKernel kernel_from_config(const Config& config);
SpectralMeasure measure_from_config(const Config& config);
Grid grid_from_config(const Config& config);
Problem problem_from_config(const Config& config);
SolveOptions solve_options_from_config(const Config& config);

struct GalleryRow {
  std::string name;
  Verdict expected = Verdict::convergent;
  Verdict got = Verdict::inconclusive;
  double beta = 0.0;
  double value = 0.0;
  bool pass() const { return expected == got; }
};

/// Verdict table of the catalogued kernel and covariance examples.
std::vector<GalleryRow> golden_gallery();

}  // namespace spde
