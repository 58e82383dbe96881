#include "tgf/identities.hpp"

#include <algorithm>
#include <cmath>

#include "tgf/nonlinear.hpp"
#include "tgf/spectral_ops.hpp"

namespace tgf {

namespace {

// Node values of curl w: three components in 3D, one (the e_3 part) in 2D.
std::vector<GridArray> curl_nodes(const SpectralField& w) {
  const auto W = collocate(w);
  const int d = W.dim;
  const std::size_t n = w.grid().grid_size();
  auto dw = [&](int a, int b) -> const GridArray& { return W.grad[a * d + b]; };  // d_b w_a
  std::vector<GridArray> out;
  if (d == 2) {
    GridArray c(n);
    for (std::size_t x = 0; x < n; ++x) c[x] = dw(1, 0)[x] - dw(0, 1)[x];
    out.push_back(std::move(c));
  } else {
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      GridArray c(n);
      for (std::size_t x = 0; x < n; ++x) c[x] = dw(k, j)[x] - dw(j, k)[x];
      out.push_back(std::move(c));
    }
  }
  return out;
}

double relative(double lhs, double rhs, double scale) {
  const double s = std::max({std::abs(lhs), std::abs(rhs), scale, 1e-300});
  return std::abs(lhs - rhs) / s;
}

}  // namespace

double curl_cross_pairing(const SpectralField& y, const SpectralField& u, const SpectralField& phi,
                          const PhysicalParams& params) {
  require_same_grid(y, u, "curl_cross_pairing");
  require_same_grid(y, phi, "curl_cross_pairing");
  const auto& g = y.grid();
  const std::size_t n = g.grid_size();
  const auto om = curl_nodes(v_apply(y, params));
  const auto U = collocate(u, false);
  const auto P = collocate(phi, false);
  double s = 0.0;
  if (g.dim() == 2) {
    for (std::size_t x = 0; x < n; ++x) s += om[0][x] * (-U.val[1][x] * P.val[0][x] + U.val[0][x] * P.val[1][x]);
  } else {
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      for (std::size_t x = 0; x < n; ++x) s += (om[j][x] * U.val[k][x] - om[k][x] * U.val[j][x]) * P.val[i][x];
    }
  }
  return s * g.node_weight();
}

double curl_v_cross_pairing(const SpectralField& y, const SpectralField& p, const SpectralField& phi,
                            const PhysicalParams& params) {
  require_same_grid(y, p, "curl_v_cross_pairing");
  require_same_grid(y, phi, "curl_v_cross_pairing");
  const auto& g = y.grid();
  const std::size_t n = g.grid_size();
  const auto Y = collocate(y, false);
  const auto Pn = collocate(p, false);
  const int d = g.dim();
  const int ncomp = d == 2 ? 1 : 3;
  // Scalar spectra of the components of s = y x p, truncated to the retained set.
  std::vector<std::vector<Complex>> s_hat(static_cast<std::size_t>(ncomp), std::vector<Complex>(g.mode_count()));
  for (int c = 0; c < ncomp; ++c) {
    const int j = d == 2 ? 0 : (c + 1) % 3, k = d == 2 ? 1 : (c + 2) % 3;
    GridArray s(n);
    for (std::size_t x = 0; x < n; ++x) s[x] = Y.val[j][x] * Pn.val[k][x] - Y.val[k][x] * Pn.val[j][x];
    Transform::get(g).from_grid(s, s_hat[c]);
  }
  SpectralField curl(g);
  for (std::size_t m = 0; m < g.mode_count(); ++m) {
    const auto& k = g.wave_vector(m);
    const double vs = v_symbol(g, m, params);
    const Complex I(0.0, 1.0);
    if (d == 2) {
      curl(0, m) = I * double(k[1]) * vs * s_hat[0][m];
      curl(1, m) = -I * double(k[0]) * vs * s_hat[0][m];
    } else {
      for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, l = (i + 2) % 3;
        curl(i, m) = I * vs * (double(k[j]) * s_hat[l][m] - double(k[l]) * s_hat[j][m]);
      }
    }
  }
  return inner(curl, phi);
}

bool IdentityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
}

double technical_constant(const WaveGrid& grid, std::uint64_t seed, int samples, const PhysicalParams& params) {
  double c = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto y = random_field(grid, seed + 7919u * static_cast<std::uint64_t>(i) + 1, 1.0, 3.0);
    const auto dl = random_field(grid, seed + 7919u * static_cast<std::uint64_t>(i) + 2, 1.0, 3.0);
    const double num = std::abs(trilinear_b(dl, y, v_apply(dl, params)));
    const double den = w24_norm(y) * std::pow(v_norm(dl, params), 2);
    if (den > 0.0) c = std::max(c, num / den);
  }
  return c;
}

IdentityReport verify_identities(std::uint64_t seed, const PhysicalParams& params, const WaveGrid& grid, int triples,
                                 const IdentityTolerances& tol, int technical_samples) {
  IdentityReport rep;
  IdentityCheck anti{"trilinear_antisymmetry", triples, 0.0, tol.antisymmetry, false};
  IdentityCheck cc{"curl_cross_identity", triples, 0.0, tol.curl_cross, false};
  IdentityCheck cv{"curl_v_cross_identity", triples, 0.0, tol.curl_v_cross, false};
  for (int t = 0; t < triples; ++t) {
    const std::uint64_t s = seed * 1000003u + 31u * static_cast<std::uint64_t>(t);
    const auto y = random_field(grid, s + 1, 1.0, 1.0);
    const auto u = random_field(grid, s + 2, 1.0, 1.0);
    const auto phi = random_field(grid, s + 3, 1.0, 1.0);

    const double b1 = trilinear_b(y, u, phi);
    const double b2 = trilinear_b(y, phi, u);
    anti.max_defect = std::max(anti.max_defect, relative(b1, -b2, 0.0));

    const auto vy = v_apply(y, params);
    const double l31 = curl_cross_pairing(y, u, phi, params);
    const double r1 = trilinear_b(phi, u, vy), r2 = trilinear_b(u, phi, vy);
    cc.max_defect = std::max(cc.max_defect, relative(l31, r1 - r2, std::abs(r1) + std::abs(r2)));

    const auto vphi = v_apply(phi, params);
    const double ipp = curl_v_cross_pairing(y, u, phi, params);
    const double q1 = trilinear_b(u, y, vphi), q2 = trilinear_b(y, u, vphi);
    cv.max_defect = std::max(cv.max_defect, relative(ipp, q1 - q2, std::abs(q1) + std::abs(q2)));
  }
  for (auto* c : {&anti, &cc, &cv}) {
    c->pass = c->max_defect <= c->tolerance;
    rep.checks.push_back(*c);
  }
  if (technical_samples > 0) {
    rep.technical_constant = technical_constant(grid, seed, technical_samples, params);
    rep.technical_constant_refined =
        technical_constant(WaveGrid(grid.dim(), grid.n_max() + 3), seed, technical_samples, params);
  }
  return rep;
}

}  // namespace tgf
