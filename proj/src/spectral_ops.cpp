#include "tgf/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tgf/transform.hpp"

namespace tgf {

SpectralField leray_project(const SpectralField& raw) {
  SpectralField out = raw;
  const auto& g = raw.grid();
  const int d = g.dim();
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    if (m == g.zero_mode()) {
      for (int a = 0; a < d; ++a) out(a, m) = 0.0;
      continue;
    }
    const auto& k = g.wave_vector(m);
    Complex kc{};
    for (int a = 0; a < d; ++a) kc += double(k[a]) * raw(a, m);
    const Complex s = kc / g.k2(m);
    for (int a = 0; a < d; ++a) out(a, m) = raw(a, m) - double(k[a]) * s;
  }
  return out;
}

namespace {

template <class F>
SpectralField scale_modes(const SpectralField& u, F symbol) {
  SpectralField out = u;
  const auto& g = u.grid();
  for (int a = 0; a < g.dim(); ++a) {
    auto c = out.component(a);
    for (std::size_t m = 0; m < g.mode_count(); ++m) c[m] *= symbol(m);
  }
  return out;
}

}  // namespace

SpectralField v_apply(const SpectralField& u, const PhysicalParams& p) {
  const auto& g = u.grid();
  return scale_modes(u, [&](std::size_t m) { return v_symbol(g, m, p); });
}

SpectralField v_inv(const SpectralField& f, const PhysicalParams& p) {
  const auto& g = f.grid();
  return scale_modes(f, [&](std::size_t m) { return 1.0 / v_symbol(g, m, p); });
}

SpectralField laplacian(const SpectralField& u) {
  const auto& g = u.grid();
  return scale_modes(u, [&](std::size_t m) { return -g.k2(m); });
}

SpectralField h1_lift(const SpectralField& u) {
  const auto& g = u.grid();
  return scale_modes(u, [&](std::size_t m) { return 1.0 + g.k2(m); });
}

double h1_norm(const SpectralField& u) { return std::sqrt(std::max(0.0, inner(u, h1_lift(u)))); }

namespace {

// vol * sum_k w(k) |u(k)|^2
template <class W>
double weighted_square(const SpectralField& u, W w) {
  const auto& g = u.grid();
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    auto c = u.component(a);
    for (std::size_t m = 0; m < g.mode_count(); ++m) s += w(m) * std::norm(c[m]);
  }
  return g.volume() * s;
}

}  // namespace

double v_norm(const SpectralField& u, const PhysicalParams& p) {
  const auto& g = u.grid();
  return std::sqrt(weighted_square(u, [&](std::size_t m) { return v_symbol(g, m, p); }));
}

double w24_norm(const SpectralField& u) {
  const auto& g = u.grid();
  const int d = g.dim();
  double s = 0.0;
  auto add = [&](const GridArray& f) {
    double t = 0.0;
    for (double v : f) t += (v * v) * (v * v);
    s += t;
  };
  for (int a = 0; a < d; ++a) {
    add(to_grid(u, a));
    for (int i = 0; i < d; ++i) {
      add(channel_to_grid(u, a, DerivMult{&g, i}));
      for (int j = i; j < d; ++j)
        add(channel_to_grid(u, a, [&](std::size_t m) {
          const auto& k = g.wave_vector(m);
          return Complex(-double(k[i]) * double(k[j]), 0.0);
        }));
    }
  }
  return std::pow(s * g.node_weight(), 0.25);
}

double w1inf_norm(const SpectralField& u) {
  const auto& g = u.grid();
  const int d = g.dim();
  std::vector<double> val(g.grid_size(), 0.0), grad(g.grid_size(), 0.0);
  for (int a = 0; a < d; ++a) {
    const auto f = to_grid(u, a);
    for (std::size_t x = 0; x < f.size(); ++x) val[x] += f[x] * f[x];
    for (int i = 0; i < d; ++i) {
      const auto df = channel_to_grid(u, a, DerivMult{&g, i});
      for (std::size_t x = 0; x < df.size(); ++x) grad[x] += df[x] * df[x];
    }
  }
  const double mv = *std::max_element(val.begin(), val.end());
  const double mg = *std::max_element(grad.begin(), grad.end());
  return std::sqrt(std::max(mv, mg));
}

NormReport norms(const SpectralField& u, const PhysicalParams& p) {
  const auto& g = u.grid();
  NormReport r;
  const double l2sq = weighted_square(u, [](std::size_t) { return 1.0; });
  const double vsq = weighted_square(u, [&](std::size_t m) { return v_symbol(g, m, p); });
  // |P v(u)|^2 and |curl v(u)|^2; for divergence-free u, |k x c|^2 = |k|^2 |c|^2.
  const double pv = weighted_square(u, [&](std::size_t m) { return std::pow(v_symbol(g, m, p), 2); });
  const double cv = weighted_square(u, [&](std::size_t m) { return std::pow(v_symbol(g, m, p), 2) * g.k2(m); });
  r.l2 = std::sqrt(l2sq);
  r.v_norm = std::sqrt(vsq);
  r.w_norm = std::sqrt(vsq + pv);
  r.wtilde_norm = std::sqrt(vsq + cv);
  r.w24_norm = w24_norm(u);
  r.w1inf_norm = w1inf_norm(u);
  return r;
}

std::vector<ModeEigenvalue> basis_eigenvalues(const WaveGrid& grid, const PhysicalParams& p) {
  std::vector<std::size_t> idx;
  for (std::size_t m = 0; m < grid.mode_count(); ++m)
    if (m != grid.zero_mode()) idx.push_back(m);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return grid.k2(a) < grid.k2(b); });
  std::vector<ModeEigenvalue> out;
  out.reserve(idx.size());
  for (auto m : idx) out.push_back({grid.wave_vector(m), 1.0 + v_symbol(grid, m, p)});
  return out;
}

SpectralField single_mode(const WaveGrid& grid, const WaveVector& k, const std::vector<double>& direction,
                          double amplitude, double phase) {
  const int d = grid.dim();
  const std::size_t m = grid.index_of(k);
  if (m == grid.zero_mode()) throw std::invalid_argument("single_mode needs k != 0");
  std::vector<double> dir(direction.begin(), direction.end());
  dir.resize(static_cast<std::size_t>(d), 0.0);
  double kd = 0.0;
  for (int a = 0; a < d; ++a) kd += k[a] * dir[a];
  double n = 0.0;
  for (int a = 0; a < d; ++a) {
    dir[a] -= k[a] * kd / grid.k2(m);
    n += dir[a] * dir[a];
  }
  if (n == 0.0) throw std::invalid_argument("single_mode direction is parallel to k");
  n = std::sqrt(n);
  SpectralField u(grid);
  const Complex e = 0.5 * amplitude * std::polar(1.0, phase);
  for (int a = 0; a < d; ++a) {
    u(a, m) = e * dir[a] / n;
    u(a, grid.mirror(m)) = std::conj(u(a, m));
  }
  return u;
}

}  // namespace tgf
