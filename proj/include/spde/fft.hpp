#pragma once

#include <complex>
#include <span>
#include <vector>

#include "spde/grid.hpp"

namespace spde {

using Complex = std::complex<double>;

/// Real-to-complex transform pair on the spatial part of a Grid.
///
/// forward computes sum_m f(x_m) e^{-2 pi i k.m / N}; inverse applies the
/// normalised inverse, so inverse(forward(f)) == f. Plans are built with
/// FFTW_ESTIMATE so results do not depend on run-time measurements. Executing
/// a plan is thread-safe; the object itself is immutable after construction.
class RealFft {
 public:
  explicit RealFft(const Grid& grid);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  void forward(std::span<const double> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<double> out) const;

  std::size_t size() const { return size_; }
  std::size_t spectral_size() const { return spectral_size_; }

 private:
  std::size_t size_;
  std::size_t spectral_size_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace spde
