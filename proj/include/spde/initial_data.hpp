#pragma once

#include <string>
#include <vector>

#include "spde/grid.hpp"

namespace spde {

/// Bounded deterministic initial condition u0.
struct InitialData {
  enum class Kind { constant, gaussian, cosine };

  Kind kind = Kind::constant;
  double amplitude = 1.0;
  /// Standard deviation of the bump for Kind::gaussian.
  double width = 1.0;
  /// Integer wavenumber along the first axis for Kind::cosine.
  int mode = 1;

  static InitialData constant(double value);
  static InitialData gaussian(double amplitude, double width);
  static InitialData cosine(double amplitude, int mode);

  double sup_norm() const;
  std::vector<double> sample(const Grid& grid) const;
  std::string describe() const;
};

InitialData::Kind initial_kind_from_string(const std::string& name);

}  // namespace spde
