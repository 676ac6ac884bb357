#include "spde/grid.hpp"

#include <cmath>
#include <numbers>

#include "spde/errors.hpp"

namespace spde {

Grid::Grid(int dim, double length, std::size_t points, double dt, std::size_t steps)
    : dim_(dim), length_(length), points_(points), dt_(dt), steps_(steps) {
  require(dim >= 1 && dim <= 3, "grid dimension must be 1, 2 or 3");
  require(length > 0.0 && std::isfinite(length), "grid period must be positive");
  require(points >= 2 && (points & (points - 1)) == 0, "grid points per axis must be a power of two");
  require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
  require(steps >= 1, "at least one time step is required");
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= points;
  spectral_size_ = size_ / points * (points / 2 + 1);
}

double Grid::cell_volume() const { return std::pow(dx(), dim_); }

double Grid::frequency_cell_volume() const {
  return std::pow(2.0 * std::numbers::pi / length_, dim_);
}

std::array<double, 3> Grid::coordinate(std::size_t site) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = dim_ - 1; a >= 0; --a) {
    const auto m = site % points_;
    site /= points_;
    x[static_cast<std::size_t>(a)] = -0.5 * length_ + static_cast<double>(m) * dx();
  }
  return x;
}

std::array<long, 3> Grid::wavenumber(std::size_t spectral_index) const {
  std::array<long, 3> k{0, 0, 0};
  const std::size_t half = points_ / 2 + 1;
  const auto n = static_cast<long>(points_);
  k[static_cast<std::size_t>(dim_ - 1)] = static_cast<long>(spectral_index % half);
  spectral_index /= half;
  for (int a = dim_ - 2; a >= 0; --a) {
    auto m = static_cast<long>(spectral_index % points_);
    spectral_index /= points_;
    k[static_cast<std::size_t>(a)] = m <= n / 2 ? m : m - n;
  }
  return k;
}

std::array<double, 3> Grid::frequency(std::size_t spectral_index) const {
  const auto k = wavenumber(spectral_index);
  const double unit = 2.0 * std::numbers::pi / length_;
  return {unit * static_cast<double>(k[0]), unit * static_cast<double>(k[1]),
          unit * static_cast<double>(k[2])};
}

double Grid::frequency_norm(std::size_t spectral_index) const {
  const auto xi = frequency(spectral_index);
  return std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
}

int Grid::hermitian_multiplicity(std::size_t spectral_index) const {
  const std::size_t last = spectral_index % (points_ / 2 + 1);
  return (last == 0 || last == points_ / 2) ? 1 : 2;
}

double Grid::nyquist() const { return std::numbers::pi * static_cast<double>(points_) / length_; }

bool Grid::same_space(const Grid& other) const {
  return dim_ == other.dim_ && points_ == other.points_ && length_ == other.length_;
}

}  // namespace spde
