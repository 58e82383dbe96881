#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tgf/wave_grid.hpp"

namespace tgf {

using Complex = std::complex<double>;

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Vector field stored as Fourier coefficients, u(x) = sum_k c(k) e^{i k.x}.
///
/// Coefficients are laid out component-major: (a, m) lives at a*modes + m.
/// The type also carries intermediate "raw" vectors (before Leray projection),
/// so divergence-freeness is a property checked by divergence_defect, not a
/// constructor guarantee. Every operator in this library that returns a state
/// returns a projected one.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const WaveGrid& grid);

  const WaveGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  std::size_t mode_count() const { return grid_.mode_count(); }

  Complex& operator()(int a, std::size_t m) { return c_[static_cast<std::size_t>(a) * grid_.mode_count() + m]; }
  const Complex& operator()(int a, std::size_t m) const {
    return c_[static_cast<std::size_t>(a) * grid_.mode_count() + m];
  }
  std::span<Complex> component(int a) {
    return {c_.data() + static_cast<std::size_t>(a) * grid_.mode_count(), grid_.mode_count()};
  }
  std::span<const Complex> component(int a) const {
    return {c_.data() + static_cast<std::size_t>(a) * grid_.mode_count(), grid_.mode_count()};
  }
  std::span<Complex> data() { return c_; }
  std::span<const Complex> data() const { return c_; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  SpectralField& axpy(double s, const SpectralField& x);
  void set_zero();
  bool is_zero() const;

 private:
  WaveGrid grid_;
  std::vector<Complex> c_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* where);

// Coefficient-space pairing: sum over (a, k) of Re(conj(u) w).
double coef_dot(const SpectralField& u, const SpectralField& w);
// L2(box) inner product, (2 pi)^d * coef_dot.
double inner(const SpectralField& u, const SpectralField& w);
double l2_norm(const SpectralField& u);
double max_abs(const SpectralField& u);
double max_abs_difference(const SpectralField& u, const SpectralField& w);

double divergence_defect(const SpectralField& u);
double reality_defect(const SpectralField& u);

// Overwrite c(-k) with conj(c(k)) for the lexicographically positive half,
// zero the mean mode and make c(k) real-symmetric.
void symmetrize(SpectralField& u);

// Random divergence-free real field with amplitude ~ |k|^-slope. Deterministic
// in seed; the L2 norm is normalized to `amplitude`.
SpectralField random_field(const WaveGrid& grid, std::uint64_t seed, double amplitude, double slope = 2.0);

// Real-dof vector (Re, Im of each component over the half spectrum).
std::vector<double> to_real_dofs(const SpectralField& u);
void from_real_dofs(std::span<const double> dofs, SpectralField& u);
std::size_t real_dof_count(const WaveGrid& grid);

}  // namespace tgf
