#include "tgf/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace tgf {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Transform::Transform(const WaveGrid& grid) : grid_(grid) {
  const int q = grid.quad_points();
  int n[3] = {q, q, q};
  std::vector<double> real(grid.grid_size());
  std::vector<fftw_complex> half(grid.half_size());
  // FFTW_UNALIGNED keeps the chosen codelets independent of buffer alignment,
  // which is what makes reruns bitwise identical.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_ = fftw_plan_dft_r2c(grid.dim(), n, real.data(), half.data(), flags);
  backward_ = fftw_plan_dft_c2r(grid.dim(), n, half.data(), real.data(), flags);
}

// Only reached during static destruction, when no worker is running.
Transform::~Transform() {
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

const Transform& Transform::get(const WaveGrid& grid) {
  static std::map<std::pair<int, int>, std::unique_ptr<Transform>> cache;
  std::lock_guard lock(plan_mutex());
  auto key = std::make_pair(grid.dim(), grid.n_max());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::unique_ptr<Transform>(new Transform(grid))).first;
  return *it->second;
}

void Transform::to_grid(std::span<const Complex> modes, std::span<double> out) const {
  thread_local std::vector<Complex> half;
  half.assign(grid_.half_size(), Complex{});
  for (std::size_t m = 0; m < grid_.mode_count(); ++m)
    if (!grid_.half_conj(m)) half[grid_.half_position(m)] = modes[m];
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), reinterpret_cast<fftw_complex*>(half.data()), out.data());
}

void Transform::from_grid(std::span<const double> in, std::span<Complex> modes) const {
  thread_local std::vector<Complex> half;
  half.resize(grid_.half_size());
  // Out-of-place r2c leaves its input untouched.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(half.data()));
  const double s = 1.0 / static_cast<double>(grid_.grid_size());
  // Read one half and mirror it, so the result is exactly real-symmetric.
  const std::size_t z = grid_.zero_mode();
  for (std::size_t m = z; m < grid_.mode_count(); ++m) {
    const Complex v = half[grid_.half_position(m)] * s;
    modes[m] = grid_.half_conj(m) ? std::conj(v) : v;
    modes[grid_.mirror(m)] = std::conj(modes[m]);
  }
  modes[z] = modes[z].real();
}

double quadrature(const WaveGrid& grid, const GridArray& values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.node_weight();
}

}  // namespace tgf
