#pragma once

#include <span>
#include <vector>

#include "tgf/spectral_field.hpp"

namespace tgf {

using GridArray = std::vector<double>;

/// Real FFT between one scalar channel of retained modes and the collocation
/// grid. to_grid is plain synthesis (no scaling); from_grid divides by the
/// node count, so from_grid(to_grid(c)) = c on the retained set.
///
/// Plans are shared and created once per (dim, quad_points); execution uses
/// thread-local scratch, so one Transform can serve several workers.
class Transform {
 public:
  static const Transform& get(const WaveGrid& grid);

  void to_grid(std::span<const Complex> modes, std::span<double> out) const;
  void from_grid(std::span<const double> in, std::span<Complex> modes) const;

  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

 private:
  explicit Transform(const WaveGrid& grid);
  WaveGrid grid_;
  void* forward_ = nullptr;   // r2c plan
  void* backward_ = nullptr;  // c2r plan
};

// Collocation values of the channel m -> mult(m) * u(a, m).
template <class Mult>
GridArray channel_to_grid(const SpectralField& u, int a, Mult mult) {
  const auto& g = u.grid();
  thread_local std::vector<Complex> buf;
  buf.resize(g.mode_count());
  auto c = u.component(a);
  for (std::size_t m = 0; m < g.mode_count(); ++m) buf[m] = mult(m) * c[m];
  GridArray out(g.grid_size());
  Transform::get(g).to_grid(buf, out);
  return out;
}

inline GridArray to_grid(const SpectralField& u, int a) {
  GridArray out(u.grid().grid_size());
  Transform::get(u.grid()).to_grid(u.component(a), out);
  return out;
}

// out(a, m) += mult(m) * F[values](m).
template <class Mult>
void add_from_grid(const GridArray& values, SpectralField& out, int a, Mult mult) {
  const auto& g = out.grid();
  thread_local std::vector<Complex> buf;
  buf.resize(g.mode_count());
  Transform::get(g).from_grid(values, buf);
  auto c = out.component(a);
  for (std::size_t m = 0; m < g.mode_count(); ++m) c[m] += mult(m) * buf[m];
}

inline void add_from_grid(const GridArray& values, SpectralField& out, int a) {
  add_from_grid(values, out, a, [](std::size_t) { return Complex(1.0); });
}

// Common multipliers.
struct IdentityMult {
  Complex operator()(std::size_t) const { return 1.0; }
};
struct DerivMult {  // d/dx_i
  const WaveGrid* g;
  int i;
  Complex operator()(std::size_t m) const { return Complex(0.0, g->wave_vector(m)[i]); }
};

// Sum of values over the collocation grid times the node weight.
double quadrature(const WaveGrid& grid, const GridArray& values);

}  // namespace tgf
