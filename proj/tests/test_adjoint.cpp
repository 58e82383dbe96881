#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "tgf/adjoint.hpp"
#include "tgf/spectral_ops.hpp"

using namespace tgf;

namespace {

struct Problem {
  SimConfig cfg;
  SpectralField y0;
  ControlField U, psi;
  TrackingTarget target;
};

Problem problem(int dim, int n_max, int steps, double T, NoiseFamily fam, double c0 = 0.5) {
  Problem pr{fixtures::config(dim, n_max, steps, T, fam, 8, c0), {}, {}, {}, {}};
  const auto& g = pr.cfg.grid;
  pr.y0 = random_field(g, 7, 1.0, 1.5);
  pr.U = ControlField(g, steps, pr.cfg.p_exp);
  pr.psi = ControlField(g, steps, pr.cfg.p_exp);
  for (int n = 0; n < steps; ++n) {
    pr.U.set(n, random_field(g, 300 + n, 0.3, 1.0));
    pr.psi.set(n, random_field(g, 500 + n, 1.0, 1.0));
  }
  pr.target.fields = {random_field(g, 9, 0.5, 2.0)};
  return pr;
}

}  // namespace

TEST_SUITE("adjoint") {

TEST_CASE("transport form equals the transpose") {
  PhysicalParams p;
  p.nu = 0.1;
  p.alpha1 = 0.05;
  p.alpha2 = 0.1;
  p.beta = 0.5;
  for (int d : {2, 3}) {
    CAPTURE(d);
    const WaveGrid g(d, d == 2 ? 6 : 4);
    const auto y = random_field(g, 21, 1.0, 1.5);
    const auto q = random_field(g, 22, 1.0, 1.5);
    const auto a = LinearizedOperator(y, p).apply_transpose(q);
    const auto b = adjoint_transport(y, q, p);
    CHECK(max_abs_difference(a, b) <= 1e-13 * max_abs(a));
  }
}

TEST_CASE("tracking helpers") {
  const WaveGrid g(2, 4);
  PhysicalParams p;
  const auto y = random_field(g, 1, 1.0);
  CHECK(tracking_source(y, y, TrackingNorm::v, p).is_zero());
  CHECK(tracking_density(y, SpectralField(g), TrackingNorm::l2, p) == doctest::Approx(0.5));
  CHECK(tracking_density(y, SpectralField(g), TrackingNorm::v, p) ==
        doctest::Approx(0.5 * std::pow(v_norm(y, p), 2)));
  CHECK(tracking_norm_from_string("v") == TrackingNorm::v);
  CHECK_THROWS_AS(tracking_norm_from_string("h1"), ConfigError);
}

TEST_CASE("pathwise duality") {
  for (auto fam : {NoiseFamily::linear, NoiseFamily::smooth_nonlinear}) {
    for (int d : {2, 3}) {
      CAPTURE(d);
      CAPTURE(to_string(fam));
      auto pr = problem(d, d == 2 ? 5 : 3, 12, 0.3, fam);
      for (auto norm : {TrackingNorm::l2, TrackingNorm::v}) {
        pr.target.norm = norm;
        const auto rep = duality_check(pr.y0, pr.U, pr.psi, pr.target, pr.cfg, 4);
        CHECK(rep.max_rel_gap <= 1e-10);
        CHECK(rep.max_residual <= 1e-11);
        CHECK(std::abs(rep.samples[0].lhs) > 0.0);
      }
    }
  }
}

TEST_CASE("adjoint vanishes at the end and after the stop") {
  auto pr = problem(2, 5, 20, 0.4, NoiseFamily::smooth_nonlinear);
  const auto path = pr.cfg.path(0);
  const auto full = simulate(pr.y0, pr.U, path, pr.cfg);
  auto cm = pr.cfg;
  cm.M = 0.5 * (full.w24_trace[0] + *std::max_element(full.w24_trace.begin(), full.w24_trace.end()));
  const auto base = simulate(pr.y0, pr.U, path, cm);
  REQUIRE(base.stop_index > 0);
  REQUIRE(base.stop_index < cm.steps);
  const auto mu = pathwise_adjoint(base, pr.target, path, cm);
  for (int n = base.stop_index; n <= cm.steps; ++n) CHECK(mu.fields[n].is_zero());
  CHECK_FALSE(mu.fields[0].is_zero());
  // Duality still holds with the stop inside the horizon.
  const auto rep = duality_check(pr.y0, pr.U, pr.psi, pr.target, cm, 3);
  CHECK(rep.samples[0].stop_index == base.stop_index);
  CHECK(rep.max_rel_gap <= 1e-10);
}

TEST_CASE("adapted backward equation") {
  // No noise: the adapted solution coincides with the pathwise one.
  auto det = problem(2, 3, 10, 0.5, NoiseFamily::zero);
  const auto r0 = adapted_bsde(det.y0, det.U, det.psi, det.target, det.cfg, 5);
  CHECK(r0.p0_vs_pathwise < 1e-12);
  CHECK(std::abs(r0.gap.mean) <= 1e-10 * std::abs(r0.rhs_mean));

  auto pr = problem(2, 3, 10, 0.5, NoiseFamily::linear, 0.3);
  pr.y0 *= 0.3;
  const auto full = simulate(pr.y0, pr.U, pr.cfg.path(0), pr.cfg);
  pr.cfg.M = 1.05 * *std::max_element(full.w24_trace.begin(), full.w24_trace.end());
  const auto rep = adapted_bsde(pr.y0, pr.U, pr.psi, pr.target, pr.cfg, 1500);
  CHECK(std::abs(rep.gap.mean) <= 3.0 * rep.gap.std_error);
  CHECK(rep.terminal_max == 0.0);
  CHECK(rep.post_stop_max == 0.0);
  CHECK(rep.post_stop_entries > 0);
  CHECK(rep.p0_vs_pathwise < 0.05);
  CHECK(std::isfinite(rep.max_condition));
}

}  // TEST_SUITE
