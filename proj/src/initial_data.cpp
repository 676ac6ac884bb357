#include "spde/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "spde/errors.hpp"

namespace spde {

InitialData InitialData::constant(double value) {
  InitialData u;
  u.kind = Kind::constant;
  u.amplitude = value;
  return u;
}

InitialData InitialData::gaussian(double amplitude, double width) {
  require(width > 0.0, "Gaussian initial data needs a positive width");
  InitialData u;
  u.kind = Kind::gaussian;
  u.amplitude = amplitude;
  u.width = width;
  return u;
}

InitialData InitialData::cosine(double amplitude, int mode) {
  InitialData u;
  u.kind = Kind::cosine;
  u.amplitude = amplitude;
  u.mode = mode;
  return u;
}

double InitialData::sup_norm() const { return std::abs(amplitude); }

std::vector<double> InitialData::sample(const Grid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    const auto x = grid.coordinate(m);
    switch (kind) {
      case Kind::constant:
        out[m] = amplitude;
        break;
      case Kind::gaussian: {
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
        out[m] = amplitude * std::exp(-0.5 * r2 / (width * width));
        break;
      }
      case Kind::cosine:
        out[m] = amplitude * std::cos(2.0 * std::numbers::pi * mode * x[0] / grid.length());
        break;
    }
  }
  return out;
}

std::string InitialData::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::constant:
      os << "constant(" << amplitude << ")";
      break;
    case Kind::gaussian:
      os << "gaussian(amplitude=" << amplitude << ", width=" << width << ")";
      break;
    case Kind::cosine:
      os << "cosine(amplitude=" << amplitude << ", mode=" << mode << ")";
      break;
  }
  return os.str();
}

InitialData::Kind initial_kind_from_string(const std::string& name) {
  if (name == "constant") return InitialData::Kind::constant;
  if (name == "gaussian") return InitialData::Kind::gaussian;
  if (name == "cosine") return InitialData::Kind::cosine;
  throw PreconditionError("unknown initial data kind '" + name + "'");
}

}  // namespace spde
