#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace spde {

/// Periodic space-time grid on the torus [-L/2, L/2)^d with J uniform time steps.
///
/// Real fields are stored row-major with N points per axis. Spectral fields use
/// the half-spectrum layout of a real-to-complex transform: the last axis keeps
/// wavenumbers 0..N/2, the other axes keep 0..N-1 with the upper half mapped to
/// negative wavenumbers. Frequencies are xi_k = 2 pi k / L.
class Grid {
 public:
  Grid(int dim, double length, std::size_t points, double dt = 1.0, std::size_t steps = 1);

  int dim() const { return dim_; }
  double length() const { return length_; }
  std::size_t points() const { return points_; }
  double dt() const { return dt_; }
  std::size_t steps() const { return steps_; }
  double horizon() const { return dt_ * static_cast<double>(steps_); }
  double dx() const { return length_ / static_cast<double>(points_); }
  double cell_volume() const;
  /// (2 pi / L)^d, the volume of one frequency cell.
  double frequency_cell_volume() const;

  std::size_t size() const { return size_; }
  std::size_t spectral_size() const { return spectral_size_; }
  double time(std::size_t step) const { return dt_ * static_cast<double>(step); }

  /// Centred coordinates of a real-space site.
  std::array<double, 3> coordinate(std::size_t site) const;
  /// Signed integer wavenumbers of a half-spectrum index.
  std::array<long, 3> wavenumber(std::size_t spectral_index) const;
  std::array<double, 3> frequency(std::size_t spectral_index) const;
  double frequency_norm(std::size_t spectral_index) const;
  /// 1 for self-conjugate modes of the half spectrum, 2 otherwise.
  int hermitian_multiplicity(std::size_t spectral_index) const;
  /// Largest |xi| component on an axis (the Nyquist frequency).
  double nyquist() const;

  bool same_space(const Grid& other) const;

 private:
  int dim_;
  double length_;
  std::size_t points_;
  double dt_;
  std::size_t steps_;
  std::size_t size_;
  std::size_t spectral_size_;
};

}  // namespace spde
