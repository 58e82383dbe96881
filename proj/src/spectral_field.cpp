#include "tgf/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tgf/spectral_ops.hpp"

namespace tgf {

SpectralField::SpectralField(const WaveGrid& grid)
    : grid_(grid), c_(static_cast<std::size_t>(grid.dim()) * grid.mode_count()) {}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(*this, o, "operator+=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(*this, o, "operator-=");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& x) {
  require_same_grid(*this, x, "axpy");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += s * x.c_[i];
  return *this;
}

void SpectralField::set_zero() { std::fill(c_.begin(), c_.end(), Complex{}); }

bool SpectralField::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Complex& v) { return v == Complex{}; });
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* where) {
  if (!(a.grid() == b.grid()))
    throw GridMismatch(std::string("grid mismatch in ") + where);
}

double coef_dot(const SpectralField& u, const SpectralField& w) {
  require_same_grid(u, w, "inner product");
  auto x = u.data();
  auto y = w.data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
  return s;
}

double inner(const SpectralField& u, const SpectralField& w) { return u.grid().volume() * coef_dot(u, w); }

double l2_norm(const SpectralField& u) { return std::sqrt(std::max(0.0, inner(u, u))); }

double max_abs(const SpectralField& u) {
  double m = 0.0;
  for (const auto& v : u.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_difference(const SpectralField& u, const SpectralField& w) {
  require_same_grid(u, w, "max_abs_difference");
  double m = 0.0;
  for (std::size_t i = 0; i < u.data().size(); ++i) m = std::max(m, std::abs(u.data()[i] - w.data()[i]));
  return m;
}

double divergence_defect(const SpectralField& u) {
  const auto& g = u.grid();
  double m = 0.0;
  for (std::size_t j = 0; j < g.mode_count(); ++j) {
    Complex d{};
    for (int a = 0; a < g.dim(); ++a) d += double(g.wave_vector(j)[a]) * u(a, j);
    m = std::max(m, std::abs(d));
  }
  return m;
}

double reality_defect(const SpectralField& u) {
  const auto& g = u.grid();
  double m = 0.0;
  for (int a = 0; a < g.dim(); ++a)
    for (std::size_t j = 0; j < g.mode_count(); ++j)
      m = std::max(m, std::abs(u(a, j) - std::conj(u(a, g.mirror(j)))));
  return m;
}

void symmetrize(SpectralField& u) {
  const auto& g = u.grid();
  const std::size_t z = g.zero_mode();
  for (int a = 0; a < g.dim(); ++a) {
    u(a, z) = 0.0;
    // Mode indices above the zero mode are the mirrors of those below it.
    for (std::size_t j = z + 1; j < g.mode_count(); ++j) u(a, g.mirror(j)) = std::conj(u(a, j));
  }
}

SpectralField random_field(const WaveGrid& grid, std::uint64_t seed, double amplitude, double slope) {
  SpectralField u(grid);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x6f1e1du};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (std::size_t j = grid.zero_mode() + 1; j < grid.mode_count(); ++j) {
    const double w = std::pow(grid.k2(j), -0.5 * slope);
    for (int a = 0; a < grid.dim(); ++a) {
      const double re = n01(rng);
      const double im = n01(rng);
      u(a, j) = w * Complex(re, im);
    }
  }
  symmetrize(u);
  u = leray_project(u);
  const double n = l2_norm(u);
  if (n > 0.0) u *= amplitude / n;
  return u;
}

std::size_t real_dof_count(const WaveGrid& grid) {
  return 2 * static_cast<std::size_t>(grid.dim()) * (grid.mode_count() / 2);
}

std::vector<double> to_real_dofs(const SpectralField& u) {
  const auto& g = u.grid();
  std::vector<double> out;
  out.reserve(real_dof_count(g));
  for (int a = 0; a < g.dim(); ++a)
    for (std::size_t j = g.zero_mode() + 1; j < g.mode_count(); ++j) {
      out.push_back(u(a, j).real());
      out.push_back(u(a, j).imag());
    }
  return out;
}

void from_real_dofs(std::span<const double> dofs, SpectralField& u) {
  const auto& g = u.grid();
  std::size_t i = 0;
  for (int a = 0; a < g.dim(); ++a) {
    u(a, g.zero_mode()) = 0.0;
    for (std::size_t j = g.zero_mode() + 1; j < g.mode_count(); ++j, i += 2) {
      u(a, j) = Complex(dofs[i], dofs[i + 1]);
      u(a, g.mirror(j)) = Complex(dofs[i], -dofs[i + 1]);
    }
  }
}

}  // namespace tgf
