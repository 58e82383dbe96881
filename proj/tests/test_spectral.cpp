#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "tgf/identities.hpp"
#include "tgf/nonlinear.hpp"
#include "tgf/spectral_ops.hpp"
#include "tgf/transform.hpp"

using namespace tgf;
using std::numbers::pi;

namespace {

PhysicalParams fluid() {
  PhysicalParams p;
  p.nu = 0.05;
  p.alpha1 = 0.02;
  p.alpha2 = -0.01;
  p.beta = 0.01;
  return p;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("grid sizes follow the two-thirds cut and padded collocation") {
  WaveGrid g(2, 8);
  CHECK(g.dealias_cut() == 5);
  CHECK(g.quad_points() == 24);
  CHECK(g.mode_count() == 121);
  WaveGrid s(2, 3);
  CHECK(s.dealias_cut() == 2);
  CHECK(s.quad_points() == 10);
  WaveGrid t(3, 5);
  CHECK(t.dealias_cut() == 3);
  CHECK(t.quad_points() == 16);
  CHECK_THROWS(WaveGrid(4, 8));
  CHECK_THROWS(WaveGrid(2, 1));
  for (std::size_t m = 0; m < t.mode_count(); ++m) {
    const auto& k = t.wave_vector(m);
    const auto& km = t.wave_vector(t.mirror(m));
    CHECK(km[0] == -k[0]);
    CHECK(km[1] == -k[1]);
    CHECK(km[2] == -k[2]);
    CHECK(t.index_of(k) == m);
  }
}

TEST_CASE("transform round trip and agreement with direct summation") {
  for (int dim : {2, 3}) {
    WaveGrid g(dim, dim == 2 ? 6 : 4);
    const auto u = random_field(g, 11, 1.0, 1.0);
    auto x = to_grid(u, 0);
    std::vector<Complex> back(g.mode_count());
    Transform::get(g).from_grid(x, back);
    for (std::size_t m = 0; m < g.mode_count(); ++m) CHECK(std::abs(back[m] - u(0, m)) < 1e-14);
    const int q = g.quad_points();
    const double h = 2 * pi / q;
    // node (1, 2[, 3]) in row-major order
    std::size_t idx = dim == 2 ? std::size_t(1 * q + 2) : std::size_t((1 * q + 2) * q + 3);
    oracle::Point pt{h, 2 * h, dim == 3 ? 3 * h : 0.0};
    CHECK(x[idx] == doctest::Approx(oracle::eval(u, 0, pt)).epsilon(1e-12));
  }
}

TEST_CASE("leray projection") {
  WaveGrid g(2, 3);
  SpectralField raw(g);
  const auto m = g.index_of({1, 1, 0});
  raw(0, m) = 1.0;
  raw(0, g.mirror(m)) = 1.0;
  const auto P = leray_project(raw);
  // Hand computation: (I - k k^T / 2)(1, 0) = (1/2, -1/2).
  CHECK(P(0, m).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(P(1, m).real() == doctest::Approx(-0.5).epsilon(1e-15));
  // Divergence at a few physical points by direct summation.
  for (double s : {0.1, 0.7, 2.3}) {
    oracle::Point x{s, 1.3 * s, 0.0};
    const double div = oracle::eval(P, 0, x, {0}) + oracle::eval(P, 1, x, {1});
    CHECK(std::abs(div) < 1e-14);
  }

  // Gradients are annihilated.
  SpectralField grad(g);
  const auto phi = random_field(g, 3, 1.0);
  for (std::size_t j = 0; j < g.mode_count(); ++j)
    for (int a = 0; a < 2; ++a) grad(a, j) = Complex(0, g.wave_vector(j)[a]) * phi(0, j);
  CHECK(max_abs(leray_project(grad)) < 1e-15);

  const auto u = random_field(g, 5, 1.0);
  CHECK(max_abs_difference(leray_project(u), u) < 1e-15);
  const auto pp = leray_project(leray_project(raw));
  CHECK(max_abs_difference(pp, P) < 1e-14);
}

TEST_CASE("v operator and modified Stokes inverse") {
  WaveGrid g(2, 6);
  PhysicalParams p = fluid();
  p.alpha1 = 2.0;
  const auto u1 = single_mode(g, {1, 0, 0}, {0, 1});
  const auto v1 = v_apply(u1, p);
  const auto m = g.index_of({1, 0, 0});
  CHECK(std::abs(v1(1, m) - 3.0 * u1(1, m)) < 1e-15);

  const auto u = random_field(g, 17, 1.0);
  CHECK(max_abs_difference(v_inv(v_apply(u, p), p), u) < 1e-13);
  PhysicalParams p0 = p;
  p0.alpha1 = 0.0;
  CHECK(max_abs_difference(v_apply(u, p0), u) == 0.0);

  // Two-derivative gain: |v^-1 f|_{H^1} <= C |f|_{H^-1} with the mode-wise C.
  const auto f = random_field(g, 19, 1.0, 0.0);
  double C = 0.0;
  for (std::size_t j = 0; j < g.mode_count(); ++j)
    if (j != g.zero_mode()) C = std::max(C, (1 + g.k2(j)) / v_symbol(g, j, p));
  const auto h = v_inv(f, p);
  double hn = 0, fn = 0;
  for (int a = 0; a < 2; ++a)
    for (std::size_t j = 0; j < g.mode_count(); ++j) {
      hn += (1 + g.k2(j)) * std::norm(h(a, j));
      if (j != g.zero_mode()) fn += std::norm(f(a, j)) / (1 + g.k2(j));
    }
  CHECK(std::sqrt(hn) <= C * std::sqrt(fn) * (1 + 1e-14));
}

TEST_CASE("trilinear form") {
  WaveGrid g(2, 4);
  const auto u = single_mode(g, {0, 1, 0}, {1, 0});                // (cos x2, 0)
  const auto z = single_mode(g, {1, 0, 0}, {0, 1});                // (0, cos x1)
  const auto w = single_mode(g, {1, 1, 0}, {1, -1}, 1.0, -pi / 2);  // (1,-1) sin(x1+x2) / sqrt2
  // By hand: int cos x2 (-sin x1)(-sin(x1 + x2)/sqrt2) = pi^2 / sqrt2.
  const double expected = pi * pi / std::sqrt(2.0);
  const double b = trilinear_b(u, z, w);
  CHECK(b == doctest::Approx(expected).epsilon(1e-13));
  const int n = oracle::fine_points(g);
  CHECK(oracle::trilinear(oracle::tabulate(u, n), oracle::tabulate(z, n), oracle::tabulate(w, n)) ==
        doctest::Approx(expected).epsilon(1e-12));

  for (int dim : {2, 3}) {
    WaveGrid h(dim, dim == 2 ? 6 : 4);
    for (int t = 0; t < 5; ++t) {
      const auto y = random_field(h, 100 + t, 1.0, 1.0);
      const auto a = random_field(h, 200 + t, 1.0, 1.0);
      const auto c = random_field(h, 300 + t, 1.0, 1.0);
      const double b1 = trilinear_b(y, a, c), b2 = trilinear_b(y, c, a);
      CHECK(std::abs(b1 + b2) <= 1e-12 * std::abs(b1));
      CHECK(std::abs(trilinear_b(y, a, a)) < 1e-13);
    }
  }
  // Random triple against the fine direct-summation oracle.
  WaveGrid h(2, 4);
  const auto y = random_field(h, 7, 1.0, 1.0), a = random_field(h, 8, 1.0, 1.0), c = random_field(h, 9, 1.0, 1.0);
  const int nf = oracle::fine_points(h);
  CHECK(trilinear_b(y, a, c) ==
        doctest::Approx(oracle::trilinear(oracle::tabulate(y, nf), oracle::tabulate(a, nf), oracle::tabulate(c, nf)))
            .epsilon(1e-12));
  CHECK_THROWS_AS(trilinear_b(y, a, random_field(WaveGrid(2, 5), 1, 1.0)), GridMismatch);
}

TEST_CASE("deformation tensor") {
  WaveGrid g(2, 4);
  const auto u = single_mode(g, {0, 1, 0}, {1, 0}, 1.0, -pi / 2);  // (sin x2, 0)
  const auto A = deformation_A(u);
  const int q = g.quad_points();
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      const std::size_t x = std::size_t(i * q + j);
      const double x2 = 2 * pi * j / q;
      CHECK(A[1][x] == doctest::Approx(std::cos(x2)).epsilon(1e-13).scale(1.0));
      CHECK(A[2][x] == doctest::Approx(std::cos(x2)).epsilon(1e-13).scale(1.0));
      CHECK(std::abs(A[0][x]) < 1e-14);
      CHECK(std::abs(A[3][x]) < 1e-14);
    }
  CHECK(deformation_A(SpectralField(g))[1] == GridArray(g.grid_size(), 0.0));
  for (int dim : {2, 3}) {
    WaveGrid h(dim, 4);
    const auto r = random_field(h, 41, 3.0, 0.5);
    const auto B = deformation_A(r);
    double tr = 0.0;
    for (std::size_t x = 0; x < h.grid_size(); ++x) {
      double t = 0.0;
      for (int a = 0; a < dim; ++a) t += B[a * dim + a][x];
      tr = std::max(tr, std::abs(t));
    }
    CHECK(tr <= 1e-12);
  }
}

TEST_CASE("state drift") {
  WaveGrid g(2, 6);
  PhysicalParams p = fluid();
  CHECK(state_drift(SpectralField(g), SpectralField(g), p).is_zero());

  // Shear mode: (y.grad)y vanishes pointwise, so with beta = alpha = 0 only
  // viscosity and the control remain.
  const auto y = single_mode(g, {0, 2, 0}, {1, 0}, 0.7);
  for (double s : {0.2, 1.1, 4.0}) {
    oracle::Point x{s, 0.5 * s, 0};
    CHECK(std::abs(oracle::eval(y, 1, x) * oracle::eval(y, 0, x, {1})) < 1e-15);
  }
  PhysicalParams lin = p;
  lin.alpha1 = lin.alpha2 = lin.beta = 0.0;
  const auto U = random_field(g, 9, 0.3);
  const auto d = state_drift(y, U, lin);
  SpectralField expect = U;
  expect.axpy(-lin.nu * 4.0, y);
  CHECK(max_abs_difference(d, expect) < 1e-15);
  CHECK(divergence_defect(state_drift(random_field(g, 4, 2.0), U, p)) < 1e-13);

  // Energy identity: (drift(y), y) = -(nu/2) int |A|^2 - ((a1+a2)/2) int tr A^3
  // - (beta/2) int |A|^4, each integral from the direct-summation oracle.
  for (int dim : {2, 3}) {
    WaveGrid h(dim, dim == 2 ? 5 : 4);
    PhysicalParams q = p;
    q.alpha2 = 0.1;  // large cross term, still under the material constraint in 3D
    q.beta = 0.5;
    q.nu = 0.1;
    REQUIRE(!q.violation());
    for (int t = 0; t < (dim == 2 ? 20 : 4); ++t) {
      const auto r = random_field(h, 500 + t, 1.5, 1.0);
      const double lhs = inner(state_drift(r, SpectralField(h), q), r);
      const auto T = oracle::tabulate(r, 2 * h.quad_points());
      const int dd = dim;
      double A2 = 0, A3 = 0, A4 = 0;
      A2 = oracle::sum_points(T, [&](std::size_t x) {
        double s = 0;
        for (int i = 0; i < dd; ++i)
          for (int j = 0; j < dd; ++j) s += std::pow(T.grad[i * dd + j][x] + T.grad[j * dd + i][x], 2);
        return s;
      });
      A3 = oracle::sum_points(T, [&](std::size_t x) {
        double s = 0;
        auto A = [&](int i, int j) { return T.grad[i * dd + j][x] + T.grad[j * dd + i][x]; };
        for (int i = 0; i < dd; ++i)
          for (int j = 0; j < dd; ++j)
            for (int k = 0; k < dd; ++k) s += A(i, j) * A(j, k) * A(k, i);
        return s;
      });
      A4 = oracle::sum_points(T, [&](std::size_t x) {
        double s = 0;
        for (int i = 0; i < dd; ++i)
          for (int j = 0; j < dd; ++j) s += std::pow(T.grad[i * dd + j][x] + T.grad[j * dd + i][x], 2);
        return s * s;
      });
      const double rhs = -0.5 * q.nu * A2 - 0.5 * (q.alpha1 + q.alpha2) * A3 - 0.5 * q.beta * A4;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
      CHECK(lhs <= 0.0);
      if (dim == 2) CHECK(std::abs(A3) < 1e-10 * A4);
    }
  }
}

TEST_CASE("norms") {
  WaveGrid g(2, 6);
  PhysicalParams p = fluid();
  p.alpha1 = 0.3;
  const auto u = single_mode(g, {1, 2, 0}, {1, 0}, 0.8);
  const double kap = 5.0;
  const auto r = norms(u, p);
  CHECK(r.v_norm * r.v_norm == doctest::Approx((1 + p.alpha1 * kap) * r.l2 * r.l2).epsilon(1e-14));
  CHECK(r.w_norm * r.w_norm ==
        doctest::Approx(r.v_norm * r.v_norm + std::pow(1 + p.alpha1 * kap, 2) * r.l2 * r.l2).epsilon(1e-14));
  const auto z = norms(SpectralField(g), p);
  CHECK(z.l2 == 0.0);
  CHECK(z.v_norm == 0.0);
  CHECK(z.w_norm == 0.0);
  CHECK(z.w24_norm == 0.0);
  CHECK(z.w1inf_norm == 0.0);

  for (int t = 0; t < 10; ++t) {
    const auto f = random_field(g, 900 + t, 1.0 + t, 1.0);
    const auto n = norms(f, p);
    CHECK(n.l2 <= n.v_norm);
    CHECK(n.v_norm <= n.w_norm);
    CHECK(n.w24_norm > 0.0);
    // |u|_V^2 = |u|^2 + 2 alpha1 |D u|^2, |D u|^2 from the oracle.
    const auto T = oracle::tabulate(f, oracle::fine_points(g));
    const double D2 = oracle::sum_points(T, [&](std::size_t x) {
      double s = 0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s += std::pow(0.5 * (T.grad[i * 2 + j][x] + T.grad[j * 2 + i][x]), 2);
      return s;
    });
    CHECK(n.v_norm * n.v_norm == doctest::Approx(n.l2 * n.l2 + 2 * p.alpha1 * D2).epsilon(1e-12));
  }

  // W^{2,4} against an independent quadrature of the fourth powers.
  WaveGrid h(2, 4);
  const auto f = random_field(h, 77, 1.0, 1.0);
  const int nf = oracle::fine_points(h);
  double s = 0.0;
  for (int a = 0; a < 2; ++a) {
    auto p4 = [&](std::initializer_list<int> dv) {
      return oracle::integrate(2, nf, [&](const oracle::Point& x) { return std::pow(oracle::eval(f, a, x, dv), 4); });
    };
    s += p4({}) + p4({0}) + p4({1}) + p4({0, 0}) + p4({0, 1}) + p4({1, 1});
  }
  CHECK(w24_norm(f) == doctest::Approx(std::pow(s, 0.25)).epsilon(1e-12));
}

TEST_CASE("basis eigenvalues") {
  WaveGrid g(2, 6);
  PhysicalParams p = fluid();
  p.alpha1 = 1.0;
  const auto ev = basis_eigenvalues(g, p);
  REQUIRE(!ev.empty());
  // |k|^2 = 1 comes first; substituting it into both inner products gives 3.
  CHECK(ev.front().mu == doctest::Approx(3.0).epsilon(1e-15));
  for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i].mu >= ev[i - 1].mu);
  for (const auto& e : ev) {
    const auto h = single_mode(g, e.k, {e.k[1] == 0 ? 0.0 : 1.0, e.k[1] == 0 ? 1.0 : -double(e.k[0]) / e.k[1]});
    const auto n = norms(h, p);
    CHECK(std::abs(n.w_norm * n.w_norm / (n.v_norm * n.v_norm) - e.mu) <= 1e-14 * e.mu);
  }
  PhysicalParams p0 = p;
  p0.alpha1 = 0.0;
  for (const auto& e : basis_eigenvalues(g, p0)) CHECK(e.mu == 2.0);
}

TEST_CASE("curl identities and the technical constant") {
  PhysicalParams p = fluid();
  for (int dim : {2, 3}) {
    WaveGrid g(dim, dim == 2 ? 6 : 4);
    const auto rep = verify_identities(123, p, g, dim == 2 ? 20 : 5, {}, 0);
    for (const auto& c : rep.checks) {
      INFO(c.name << " " << c.max_defect);
      CHECK(c.pass);
    }
    const SpectralField zero(g);
    const auto u = random_field(g, 1, 1.0), phi = random_field(g, 2, 1.0);
    CHECK(curl_cross_pairing(zero, u, phi, p) == 0.0);
    CHECK(curl_v_cross_pairing(zero, u, phi, p) == 0.0);
  }
  const double c1 = technical_constant(WaveGrid(2, 5), 9, 100, p);
  const double c2 = technical_constant(WaveGrid(2, 8), 9, 100, p);
  CHECK(std::isfinite(c1));
  CHECK(c1 > 0.0);
  CHECK(c2 / c1 < 2.0);
  CHECK(c1 / c2 < 2.0);
}

TEST_CASE("a corrupted tolerance names the failing identity") {
  IdentityTolerances tol;
  tol.curl_cross = 0.0;
  const auto rep = verify_identities(5, fluid(), WaveGrid(2, 4), 3, tol, 0);
  CHECK(!rep.all_pass());
  bool named = false;
  for (const auto& c : rep.checks)
    if (!c.pass) named = c.name == "curl_cross_identity";
  CHECK(named);
}

}  // TEST_SUITE
