#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "tgf/control.hpp"
#include "tgf/spectral_ops.hpp"

using namespace tgf;

namespace {

ControlProblem small_problem(NoiseFamily fam, int samples) {
  ControlProblem pb;
  pb.cfg = fixtures::config(2, 3, 20, 1.0, fam, 8, 0.2);
  const auto& g = pb.cfg.grid;
  pb.y0 = random_field(g, 7, 1.0, 1.5);
  pb.target.fields = {random_field(g, 9, 0.5, 1.0)};
  pb.samples = samples;
  pb.lambda = 1e-2;
  pb.set.radius = 10.0;
  return pb;
}

ControlField random_control(const WaveGrid& g, int steps, double p_exp, std::uint64_t seed, double amp) {
  ControlField c(g, steps, p_exp);
  for (int n = 0; n < steps; ++n) c.set(n, random_field(g, seed * 100 + n, amp, 1.0));
  return c;
}

}  // namespace

TEST_SUITE("control") {

TEST_CASE("cost evaluation") {
  auto pb = small_problem(NoiseFamily::linear, 4);
  const auto& g = pb.cfg.grid;
  const double dt = pb.cfg.dt();
  ControlField zero(g, pb.cfg.steps, pb.cfg.p_exp);

  auto still = pb;
  still.y0 = SpectralField(g);
  still.target.fields = {SpectralField(g)};
  const auto c0 = eval_cost(still, zero);
  CHECK(c0.total == 0.0);
  CHECK(eval_cost(pb, zero).penalty == 0.0);

  // Deterministic single sample against a hand-summed quadrature.
  auto det = pb;
  det.cfg.model.family = NoiseFamily::zero;
  det.cfg.model.K = 0;
  det.samples = 1;
  const auto U = random_control(g, det.cfg.steps, det.cfg.p_exp, 3, 0.3);
  const auto tr = simulate(det.y0, U, det.cfg.path(0), det.cfg);
  double track = 0.0;
  for (int n = 0; n < det.cfg.steps; ++n) {
    const auto e = tr.fields[n] - det.target.at(0);
    double s = 0.0;
    for (int a = 0; a < 2; ++a)
      for (std::size_t m = 0; m < g.mode_count(); ++m) s += std::norm(e(a, m));
    track += 0.5 * dt * 4.0 * M_PI * M_PI * s;
  }
  double pen = 0.0;
  for (int n = 0; n < det.cfg.steps; ++n) pen += dt * std::pow(h1_norm(U.at(n)), det.cfg.p_exp);
  pen *= det.lambda / det.cfg.p_exp;
  const auto c = eval_cost(det, U);
  CHECK(c.tracking == doctest::Approx(track).epsilon(1e-12));
  CHECK(c.penalty == doctest::Approx(pen).epsilon(1e-12));
  CHECK(c.total == c.tracking + c.penalty);

  CHECK_THROWS_AS(eval_cost(pb, ControlField(g, 5, pb.cfg.p_exp)), std::invalid_argument);
}

TEST_CASE("penalty derivative") {
  const WaveGrid g(2, 4);
  const auto U = random_control(g, 6, 8.0, 1, 0.7);
  const auto psi = random_control(g, 6, 8.0, 2, 1.0);
  const double dt = 0.1, lambda = 0.3, rho = 1e-5;
  auto up = U, dn = U;
  up.axpy(rho, psi);
  dn.axpy(-rho, psi);
  const double fd = (penalty_value(up, lambda, dt) - penalty_value(dn, lambda, dt)) / (2 * rho);
  CHECK(control_dot(penalty_gradient(U, lambda), psi, dt) == doctest::Approx(fd).epsilon(1e-8));
  CHECK(penalty_gradient(ControlField(g, 6, 8.0), lambda).is_zero());
  // Symmetric pairing of the representative.
  const auto G = penalty_gradient(U, 1.0);
  double a = 0.0, b = 0.0;
  for (int n = 0; n < 6; ++n) {
    const double w = std::pow(h1_norm(U.at(n)), 6.0);
    a += dt * w * inner(h1_lift(U.at(n)), psi.at(n));
    b += dt * w * inner(U.at(n), h1_lift(psi.at(n)));
  }
  CHECK(control_dot(G, psi, dt) == doctest::Approx(a).epsilon(1e-12));
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("adjoint gradient") {
  for (auto fam : {NoiseFamily::linear, NoiseFamily::smooth_nonlinear}) {
    CAPTURE(to_string(fam));
    auto pb = small_problem(fam, 4);
    const auto& g = pb.cfg.grid;
    const auto U = random_control(g, pb.cfg.steps, pb.cfg.p_exp, 4, 0.5);
    const auto G = cost_gradient(pb, U);
    CHECK_FALSE(G.frozen_indicator);
    CHECK(G.cost.total == doctest::Approx(eval_cost(pb, U).total).epsilon(1e-14));
    for (std::uint64_t s : {11, 12, 13}) {
      const auto psi = random_control(g, pb.cfg.steps, pb.cfg.p_exp, s, 1.0);
      const double dj = control_dot(G.gradient, psi, pb.cfg.dt());
      const double fd = central_difference(pb, U, psi, 1e-4);
      CHECK(std::abs(dj - fd) <= 1e-4 * std::abs(fd));
      const double tg = tangent_derivative(pb, U, psi);
      CHECK(std::abs(dj - tg) <= 1e-10 * std::abs(tg));
    }
  }

  // Target equal to the deterministic trajectory: only the penalty remains.
  auto det = small_problem(NoiseFamily::zero, 1);
  const auto U = random_control(det.cfg.grid, det.cfg.steps, det.cfg.p_exp, 4, 0.5);
  det.target.fields = simulate(det.y0, U, det.cfg.path(0), det.cfg).fields;
  det.target.fields.pop_back();
  const auto G = cost_gradient(det, U);
  ControlField diff = G.gradient;
  diff.axpy(-1.0, penalty_gradient(U, det.lambda));
  for (const auto& f : diff.values()) CHECK(max_abs(f) == 0.0);
}

TEST_CASE("admissible projection") {
  const WaveGrid g(2, 4);
  const AdmissibleSet set{2.0};
  const double dt = 0.1;
  auto U = random_control(g, 5, 8.0, 1, 1.0);
  auto in = U;
  in *= 1.0 / U.norm(dt);
  const auto pin = project_admissible(in, set, dt);
  for (int n = 0; n < 5; ++n) CHECK(max_abs_difference(pin.at(n), in.at(n)) == 0.0);
  auto out = U;
  out *= 4.0 / U.norm(dt);
  const auto p = project_admissible(out, set, dt);
  CHECK(p.norm(dt) == doctest::Approx(2.0).epsilon(1e-12));
  for (int n = 0; n < 5; ++n) CHECK(max_abs_difference(p.at(n), 0.5 * out.at(n)) <= 1e-15 * max_abs(out.at(n)));
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto V = random_control(g, 5, 8.0, 50 + s, 0.5 + s);
    const auto once = project_admissible(V, set, dt);
    const auto twice = project_admissible(once, set, dt);
    CHECK(once.norm(dt) <= 2.0 * (1 + 1e-12));
    for (int n = 0; n < 5; ++n) CHECK(max_abs_difference(once.at(n), twice.at(n)) <= 1e-15 * max_abs(once.at(n)));
  }
}

TEST_CASE("optimizer") {
  // Already optimal: zero state, zero target.
  auto still = small_problem(NoiseFamily::zero, 1);
  still.y0 = SpectralField(still.cfg.grid);
  still.target.fields = {SpectralField(still.cfg.grid)};
  const ControlField zero(still.cfg.grid, still.cfg.steps, still.cfg.p_exp);
  const auto r0 = optimize(still, zero, {});
  CHECK(r0.converged);
  CHECK(r0.log.size() == 1);
  CHECK(r0.U.is_zero());

  auto pb = small_problem(NoiseFamily::linear, 8);
  pb.set.radius = 5.0;
  const auto before = optimality_residual(pb, zero, 16);
  CHECK(before.residual < 0.0);
  CHECK(before.directions[before.worst].kind == "descent");

  OptimizerOptions opt;
  opt.tol = 1e-5;
  opt.max_iter = 300;
  const auto res = optimize(pb, zero, opt);
  CHECK(res.converged);
  for (std::size_t i = 1; i < res.log.size(); ++i) CHECK(res.log[i].cost < res.log[i - 1].cost);
  CHECK(res.U.norm(pb.cfg.dt()) <= pb.set.radius * (1 + 1e-12));
  const auto cert = optimality_residual(pb, res.U, 64);
  CHECK(cert.directions.size() == 64);
  CHECK(cert.residual >= -1e-4);
}

}  // TEST_SUITE
