#pragma once
// Independent reference evaluations for the tests. Everything here sums the
// Fourier series directly at physical points; no FFT and no library
// collocation code is involved.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "tgf/spectral_field.hpp"

namespace oracle {

using Point = std::array<double, 3>;

// d^{derivs} u_a at x, where derivs lists axes (repeats allowed).
inline double eval(const tgf::SpectralField& u, int a, const Point& x, std::initializer_list<int> derivs = {}) {
  const auto& g = u.grid();
  std::complex<double> s{};
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    const auto& k = g.wave_vector(m);
    std::complex<double> f = u(a, m);
    if (f == std::complex<double>{}) continue;
    for (int i : derivs) f *= std::complex<double>(0.0, k[i]);
    const double ph = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
    s += f * std::complex<double>(std::cos(ph), std::sin(ph));
  }
  return s.real();
}

// Midpoint-free uniform rule with n points per axis: exact for trigonometric
// polynomials of degree < n.
inline double integrate(int dim, int n, const std::function<double(const Point&)>& f) {
  const double h = 2.0 * std::numbers::pi / n;
  double s = 0.0;
  if (dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += f({i * h, j * h, 0.0});
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) s += f({i * h, j * h, l * h});
  }
  return s * std::pow(h, dim);
}

// Points per axis at four times the retained resolution.
inline int fine_points(const tgf::WaveGrid& g) { return 4 * g.side(); }

// Tabulates a field and its first derivatives at the fine points.
struct Tab {
  int dim = 0, n = 0;
  std::vector<std::vector<double>> val;   // [a][point]
  std::vector<std::vector<double>> grad;  // [a*d+b][point] = d_b u_a
  std::size_t index(const Point& x) const {
    const double h = 2.0 * std::numbers::pi / n;
    std::size_t i = static_cast<std::size_t>(std::lround(x[0] / h));
    std::size_t j = static_cast<std::size_t>(std::lround(x[1] / h));
    std::size_t l = dim == 3 ? static_cast<std::size_t>(std::lround(x[2] / h)) : 0;
    return dim == 2 ? i * n + j : (i * n + j) * n + l;
  }
};

inline Tab tabulate(const tgf::SpectralField& u, int n) {
  Tab t;
  t.dim = u.dim();
  t.n = n;
  const int d = t.dim;
  const std::size_t np = d == 2 ? std::size_t(n) * n : std::size_t(n) * n * n;
  t.val.assign(d, std::vector<double>(np));
  t.grad.assign(d * d, std::vector<double>(np));
  const double h = 2.0 * std::numbers::pi / n;
  for (std::size_t p = 0; p < np; ++p) {
    Point x{};
    if (d == 2) {
      x = {double(p / n) * h, double(p % n) * h, 0.0};
    } else {
      x = {double(p / (std::size_t(n) * n)) * h, double((p / n) % n) * h, double(p % n) * h};
    }
    for (int a = 0; a < d; ++a) {
      t.val[a][p] = eval(u, a, x);
      for (int b = 0; b < d; ++b) t.grad[a * d + b][p] = eval(u, a, x, {b});
    }
  }
  return t;
}

inline double sum_points(const Tab& t, const std::function<double(std::size_t)>& f) {
  const std::size_t np = t.val[0].size();
  double s = 0.0;
  for (std::size_t p = 0; p < np; ++p) s += f(p);
  return s * std::pow(2.0 * std::numbers::pi / t.n, t.dim);
}

// b(u, z, w) from tabulated fields.
inline double trilinear(const Tab& u, const Tab& z, const Tab& w) {
  const int d = u.dim;
  return sum_points(u, [&](std::size_t p) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s += u.val[i][p] * z.grad[j * d + i][p] * w.val[j][p];
    return s;
  });
}

}  // namespace oracle
