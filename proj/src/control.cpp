#include "tgf/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "tgf/parallel.hpp"
#include "tgf/spectral_ops.hpp"

namespace tgf {

namespace {

// Samples are processed in fixed-size batches and reduced in index order,
// so sums do not depend on the worker count and memory stays bounded.
constexpr int kBatch = 32;

void check_shapes(const ControlProblem& pb, const ControlField& U) {
  if (U.steps() != pb.cfg.steps)
    throw std::invalid_argument("control has " + std::to_string(U.steps()) + " steps, config has " +
                                std::to_string(pb.cfg.steps));
  const auto nt = pb.target.fields.size();
  if (nt != 1 && nt != static_cast<std::size_t>(pb.cfg.steps))
    throw std::invalid_argument("target must have 1 or " + std::to_string(pb.cfg.steps) + " fields");
}

double l2dt_norm(const ControlField& a, double dt) { return std::sqrt(std::max(0.0, control_dot(a, a, dt))); }

ControlField difference(const ControlField& a, const ControlField& b) {
  ControlField d = a;
  d.axpy(-1.0, b);
  return d;
}

ControlField random_control(const WaveGrid& g, int steps, double p_exp, std::uint64_t seed) {
  ControlField c(g, steps, p_exp);
  for (int n = 0; n < steps; ++n) c.set(n, random_field(g, seed * 7919 + static_cast<std::uint64_t>(n), 1.0, 1.0));
  return c;
}

ControlField scaled_to(ControlField c, double target, double dt) {
  const double nrm = c.norm(dt);
  if (nrm > 0.0) c *= target / nrm;
  return c;
}

}  // namespace

double penalty_value(const ControlField& U, double lambda, double dt) {
  const double p = U.p_exp();
  double s = 0.0;
  for (double h : U.h1_trace()) s += dt * std::pow(h, p);
  return lambda / p * s;
}

ControlField penalty_gradient(const ControlField& U, double lambda) {
  ControlField out(U.grid(), U.steps(), U.p_exp());
  const auto h = U.h1_trace();
  for (int n = 0; n < U.steps(); ++n) {
    if (h[n] == 0.0) continue;
    auto r = h1_lift(U.at(n));
    r *= lambda * std::pow(h[n], U.p_exp() - 2.0);
    out.set(n, r);
  }
  return out;
}

CostReport eval_cost(const ControlProblem& pb, const ControlField& U) {
  check_shapes(pb, U);
  const auto& cfg = pb.cfg;
  const double dt = cfg.dt();
  std::vector<double> track(static_cast<std::size_t>(pb.samples));
  std::vector<int> stops(static_cast<std::size_t>(pb.samples));
  parallel_for(pb.samples, cfg.workers, [&](int i) {
    const auto tr = simulate(pb.y0, U, cfg.path(static_cast<std::uint64_t>(i)), cfg);
    double s = 0.0;
    for (int n = 0; n < std::min(tr.stop_index, cfg.steps); ++n)
      s += dt * tracking_density(tr.fields[n], pb.target.at(n), pb.target.norm, cfg.params);
    track[i] = s;
    stops[i] = tr.stop_index;
  });
  CostReport r;
  r.samples = pb.samples;
  r.stop_histogram.assign(static_cast<std::size_t>(cfg.steps) + 1, 0);
  for (int i = 0; i < pb.samples; ++i) {
    r.tracking += track[i] / pb.samples;
    ++r.stop_histogram[stops[i]];
    if (stops[i] < cfg.steps) ++r.stopped;
  }
  r.penalty = penalty_value(U, pb.lambda, dt);
  r.total = r.tracking + r.penalty;
  return r;
}

GradientReport cost_gradient(const ControlProblem& pb, const ControlField& U) {
  check_shapes(pb, U);
  const auto& cfg = pb.cfg;
  const double dt = cfg.dt();
  const int N = cfg.steps;
  GradientReport rep;
  rep.gradient = penalty_gradient(U, pb.lambda);
  std::vector<SpectralField> mean(static_cast<std::size_t>(N), SpectralField(cfg.grid));
  rep.cost.samples = pb.samples;
  rep.cost.stop_histogram.assign(static_cast<std::size_t>(N) + 1, 0);

  struct Slot {
    std::vector<SpectralField> mu;
    double tracking = 0.0;
    int stop = 0;
  };
  for (int b0 = 0; b0 < pb.samples; b0 += kBatch) {
    const int nb = std::min(kBatch, pb.samples - b0);
    std::vector<Slot> slots(static_cast<std::size_t>(nb));
    parallel_for(nb, cfg.workers, [&](int j) {
      const int i = b0 + j;
      const auto path = cfg.path(static_cast<std::uint64_t>(i));
      const auto tr = simulate(pb.y0, U, path, cfg);
      auto& sl = slots[j];
      sl.stop = tr.stop_index;
      for (int n = 0; n < std::min(tr.stop_index, N); ++n)
        sl.tracking += dt * tracking_density(tr.fields[n], pb.target.at(n), pb.target.norm, cfg.params);
      sl.mu = pathwise_adjoint(tr, pb.target, path, cfg).fields;
    });
    for (const auto& sl : slots) {
      for (int n = 0; n < N; ++n) mean[n].axpy(1.0 / pb.samples, sl.mu[n + 1]);
      rep.cost.tracking += sl.tracking / pb.samples;
      ++rep.cost.stop_histogram[sl.stop];
      if (sl.stop < N) ++rep.cost.stopped;
    }
  }
  for (int n = 0; n < N; ++n) rep.gradient.set(n, rep.gradient.at(n) + mean[n]);
  rep.cost.penalty = penalty_value(U, pb.lambda, dt);
  rep.cost.total = rep.cost.tracking + rep.cost.penalty;
  rep.frozen_indicator = rep.cost.stopped > 0;
  return rep;
}

double tangent_derivative(const ControlProblem& pb, const ControlField& U, const ControlField& psi) {
  check_shapes(pb, U);
  const auto& cfg = pb.cfg;
  const double dt = cfg.dt();
  std::vector<double> d(static_cast<std::size_t>(pb.samples));
  parallel_for(pb.samples, cfg.workers, [&](int i) {
    const auto path = cfg.path(static_cast<std::uint64_t>(i));
    const auto tr = simulate(pb.y0, U, path, cfg);
    const auto z = simulate_tangent(tr, psi, path, cfg);
    double s = 0.0;
    for (int n = 0; n < std::min(tr.stop_index, cfg.steps); ++n)
      s += dt * inner(tracking_source(tr.fields[n], pb.target.at(n), pb.target.norm, cfg.params), z.fields[n]);
    d[i] = s;
  });
  double mean = 0.0;
  for (double x : d) mean += x / pb.samples;
  return mean + control_dot(penalty_gradient(U, pb.lambda), psi, dt);
}

double central_difference(const ControlProblem& pb, const ControlField& U, const ControlField& psi, double rho) {
  ControlField up = U, dn = U;
  up.axpy(rho, psi);
  dn.axpy(-rho, psi);
  return (eval_cost(pb, up).total - eval_cost(pb, dn).total) / (2.0 * rho);
}

ControlField project_admissible(const ControlField& U, const AdmissibleSet& set, double dt) {
  const double nrm = U.norm(dt);
  if (nrm <= set.radius) return U;
  ControlField out = U;
  out *= set.radius / nrm;
  return out;
}

OptimizeResult optimize(const ControlProblem& pb, const ControlField& U0, const OptimizerOptions& opt,
                        const std::function<void(const IterateLog&)>& on_iterate) {
  const double dt = pb.cfg.dt();
  OptimizeResult res;
  res.U = project_admissible(U0, pb.set, dt);
  auto cur = cost_gradient(pb, res.U);
  double step = opt.initial_step;
  ControlField prevU, prevG;
  for (int it = 0;; ++it) {
    IterateLog row;
    row.iter = it;
    row.cost = cur.cost.total;
    row.tracking = cur.cost.tracking;
    row.penalty = cur.cost.penalty;
    row.stopped_fraction = static_cast<double>(cur.cost.stopped) / std::max(1, cur.cost.samples);
    ControlField trial = res.U;
    trial.axpy(-1.0, cur.gradient);
    row.grad_norm = l2dt_norm(difference(res.U, project_admissible(trial, pb.set, dt)), dt);
    if (row.grad_norm <= opt.tol || it >= opt.max_iter) {
      res.converged = row.grad_norm <= opt.tol;
      res.log.push_back(row);
      if (on_iterate) on_iterate(row);
      break;
    }

    if (it > 0 && opt.barzilai_borwein) {
      const auto dU = difference(res.U, prevU);
      const auto dG = difference(cur.gradient, prevG);
      const double sy = control_dot(dU, dG, dt);
      if (sy > 0.0) step = std::clamp(control_dot(dU, dU, dt) / sy, 1e-10, 1e10);
    }
    bool accepted = false;
    ControlField next;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      next = res.U;
      next.axpy(-step, cur.gradient);
      next = project_admissible(next, pb.set, dt);
      const double slope = control_dot(cur.gradient, difference(next, res.U), dt);
      const double J = eval_cost(pb, next).total;
      if (J <= cur.cost.total + opt.armijo * slope && J <= cur.cost.total) {
        accepted = true;
        row.backtracks = bt;
        break;
      }
      step *= opt.shrink;
    }
    row.step = accepted ? step : 0.0;
    res.log.push_back(row);
    if (on_iterate) on_iterate(row);
    if (!accepted) {
      res.line_search_failed = true;
      break;
    }
    prevU = res.U;
    prevG = cur.gradient;
    res.U = std::move(next);
    cur = cost_gradient(pb, res.U);
  }
  return res;
}

ResidualReport optimality_residual(const ControlProblem& pb, const ControlField& U, int n_dirs, std::uint64_t seed) {
  const auto& cfg = pb.cfg;
  const auto& g = cfg.grid;
  const double dt = cfg.dt();
  const double r = pb.set.radius;
  const auto grad = cost_gradient(pb, U).gradient;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto modes = basis_eigenvalues(g, cfg.params);

  std::vector<std::pair<std::string, ControlField>> cands;
  if (!grad.is_zero() && n_dirs > 0) {
    ControlField d = grad;
    d *= -1.0;
    cands.emplace_back("descent", scaled_to(d, r, dt));
  }
  const char* kinds[] = {"interior", "boundary", "coordinate+", "coordinate-"};
  std::size_t coord = 0;
  SpectralField mode(g);
  for (int j = 0; static_cast<int>(cands.size()) < n_dirs; ++j) {
    const std::string kind = kinds[j % 4];
    if (kind == "interior") {
      cands.emplace_back(kind, scaled_to(random_control(g, cfg.steps, U.p_exp(), rng()), r * unif(rng), dt));
    } else if (kind == "boundary") {
      cands.emplace_back(kind, scaled_to(random_control(g, cfg.steps, U.p_exp(), rng()), r, dt));
    } else {
      // Each mode once with a random polarization, for both signs.
      if (kind == "coordinate+") {
        const auto& k = modes[coord++ % modes.size()].k;
        std::vector<double> dir(static_cast<std::size_t>(g.dim()));
        for (auto& c : dir) c = unif(rng) - 0.5;
        mode = single_mode(g, k, dir, 1.0, 2.0 * M_PI * unif(rng));
      }
      ControlField c(g, cfg.steps, U.p_exp());
      SpectralField f = mode;
      if (kind == "coordinate-") f *= -1.0;
      for (int n = 0; n < cfg.steps; ++n) c.set(n, f);
      if (c.is_zero()) continue;
      cands.emplace_back(kind, scaled_to(c, r, dt));
    }
  }

  ResidualReport rep;
  rep.residual = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cands.size(); ++j) {
    const double v = control_dot(grad, difference(cands[j].second, U), dt);
    rep.directions.push_back({cands[j].first, v});
    if (v < rep.residual) {
      rep.residual = v;
      rep.worst = static_cast<int>(j);
    }
  }
  if (cands.empty()) rep.residual = 0.0;
  return rep;
}

}  // namespace tgf
