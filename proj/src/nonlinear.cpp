#include "tgf/nonlinear.hpp"

#include "tgf/spectral_ops.hpp"

namespace tgf {

VectorGrid collocate(const SpectralField& u, bool with_gradient) {
  const auto& g = u.grid();
  const int d = g.dim();
  VectorGrid out;
  out.dim = d;
  for (int a = 0; a < d; ++a) out.val.push_back(to_grid(u, a));
  if (with_gradient)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) out.grad.push_back(channel_to_grid(u, a, DerivMult{&g, b}));
  return out;
}

StateGrid collocate_state(const SpectralField& y, const PhysicalParams& params) {
  return {collocate(y), collocate(v_apply(y, params))};
}

namespace {

std::vector<GridArray> symmetric_gradient(const VectorGrid& u, std::size_t n) {
  const int d = u.dim;
  std::vector<GridArray> A(static_cast<std::size_t>(d * d), GridArray(n));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const auto& gij = u.grad[i * d + j];
      const auto& gji = u.grad[j * d + i];
      auto& Aij = A[i * d + j];
      for (std::size_t x = 0; x < n; ++x) Aij[x] = gij[x] + gji[x];
    }
  return A;
}

}  // namespace

std::vector<GridArray> deformation_A(const SpectralField& u) {
  return symmetric_gradient(collocate(u), u.grid().grid_size());
}

double trilinear_b(const SpectralField& u, const SpectralField& z, const SpectralField& w) {
  require_same_grid(u, z, "trilinear_b");
  require_same_grid(u, w, "trilinear_b");
  const auto& g = u.grid();
  const int d = g.dim();
  const auto U = collocate(u, false);
  const auto Z = collocate(z, true);
  const auto W = collocate(w, false);
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const auto& ui = U.val[i];
      const auto& dz = Z.grad[j * d + i];
      const auto& wj = W.val[j];
      for (std::size_t x = 0; x < g.grid_size(); ++x) s += ui[x] * dz[x] * wj[x];
    }
  return s * g.node_weight();
}

void add_divergence(const std::vector<GridArray>& T, SpectralField& out) {
  const auto& g = out.grid();
  const int d = g.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) add_from_grid(T[i * d + j], out, i, DerivMult{&g, j});
}

SpectralField explicit_drift(const StateGrid& s, const WaveGrid& grid, const PhysicalParams& p) {
  SpectralField out(grid);
  if (!p.nonlinear) return out;
  const int d = grid.dim();
  const std::size_t n = grid.grid_size();
  const auto& y = s.y;
  const auto& vy = s.vy;

  for (int i = 0; i < d; ++i) {
    GridArray f(n, 0.0);
    for (int j = 0; j < d; ++j) {
      const auto& yj = y.val[j];
      const auto& dvi = vy.grad[i * d + j];  // d_j v_i
      const auto& vj = vy.val[j];
      const auto& dyj = y.grad[j * d + i];   // d_i y_j
      for (std::size_t x = 0; x < n; ++x) f[x] -= yj[x] * dvi[x] + vj[x] * dyj[x];
    }
    add_from_grid(f, out, i);
  }

  const double a12 = p.alpha1 + p.alpha2;
  if (a12 != 0.0 || p.beta != 0.0) {
    const auto A = symmetric_gradient(y, n);
    std::vector<GridArray> S(static_cast<std::size_t>(d * d), GridArray(n));
    double Ax[9], A2[9];
    for (std::size_t x = 0; x < n; ++x) {
      double nrm = 0.0;
      for (int q = 0; q < d * d; ++q) {
        Ax[q] = A[q][x];
        nrm += Ax[q] * Ax[q];
      }
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double t = 0.0;
          for (int m = 0; m < d; ++m) t += Ax[i * d + m] * Ax[m * d + j];
          A2[i * d + j] = t;
        }
      for (int q = 0; q < d * d; ++q) S[q][x] = a12 * A2[q] + p.beta * nrm * Ax[q];
    }
    add_divergence(S, out);
  }
  return leray_project(out);
}

SpectralField explicit_drift(const SpectralField& y, const PhysicalParams& p) {
  if (!p.nonlinear) return SpectralField(y.grid());
  return explicit_drift(collocate_state(y, p), y.grid(), p);
}

SpectralField state_drift(const SpectralField& y, const SpectralField& U_t, const PhysicalParams& p) {
  require_same_grid(y, U_t, "state_drift");
  SpectralField out = explicit_drift(y, p);
  out.axpy(p.nu, laplacian(y));
  out += leray_project(U_t);
  return out;
}

}  // namespace tgf
