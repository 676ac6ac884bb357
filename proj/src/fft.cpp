#include "spde/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "spde/errors.hpp"

namespace spde {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(const Grid& grid) : size_(grid.size()), spectral_size_(grid.spectral_size()) {
  int dims[3];
  for (int a = 0; a < grid.dim(); ++a) dims[a] = static_cast<int>(grid.points());
  std::vector<double> real(size_);
  std::vector<Complex> spec(spectral_size_);
  auto* r = real.data();
  auto* c = reinterpret_cast<fftw_complex*>(spec.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c(grid.dim(), dims, r, c, flags);
  inverse_plan_ = fftw_plan_dft_c2r(grid.dim(), dims, c, r, flags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) throw Error("FFTW planning failed");
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) const {
  require(in.size() == size_ && out.size() == spectral_size_, "forward transform size mismatch");
  // r2c leaves its input intact, but the API is not const-qualified.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) const {
  require(in.size() == spectral_size_ && out.size() == size_, "inverse transform size mismatch");
  std::vector<Complex> scratch(in.begin(), in.end());  // c2r destroys its input
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& v : out) v *= scale;
}

}  // namespace spde
