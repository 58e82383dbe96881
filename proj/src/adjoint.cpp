#include "tgf/adjoint.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "tgf/nonlinear.hpp"
#include "tgf/parallel.hpp"
#include "tgf/spectral_ops.hpp"

namespace tgf {

std::string to_string(TrackingNorm n) { return n == TrackingNorm::l2 ? "l2" : "v"; }

TrackingNorm tracking_norm_from_string(const std::string& s) {
  if (s == "l2" || s == "L2") return TrackingNorm::l2;
  if (s == "v" || s == "V") return TrackingNorm::v;
  throw ConfigError("unknown tracking norm '" + s + "' (expected l2 or v)");
}

SpectralField tracking_source(const SpectralField& y, const SpectralField& yd, TrackingNorm norm,
                              const PhysicalParams& params) {
  auto e = leray_project(y - yd);
  return norm == TrackingNorm::l2 ? e : v_apply(e, params);
}

double tracking_density(const SpectralField& y, const SpectralField& yd, TrackingNorm norm,
                        const PhysicalParams& params) {
  const auto e = leray_project(y - yd);
  const double n = norm == TrackingNorm::l2 ? l2_norm(e) : v_norm(e, params);
  return 0.5 * n * n;
}

namespace {

void solve_implicit(SpectralField& rhs, const SimConfig& cfg) {
  const auto& g = cfg.grid;
  const double dt = cfg.dt();
  for (int a = 0; a < g.dim(); ++a) {
    auto c = rhs.component(a);
    for (std::size_t m = 0; m < g.mode_count(); ++m) c[m] /= v_symbol(g, m, cfg.params) + dt * cfg.params.nu * g.k2(m);
  }
}

SpectralField implicit_apply(const SpectralField& u, const SimConfig& cfg) {
  auto out = u;
  const auto& g = cfg.grid;
  const double dt = cfg.dt();
  for (int a = 0; a < g.dim(); ++a) {
    auto c = out.component(a);
    for (std::size_t m = 0; m < g.mode_count(); ++m) c[m] *= v_symbol(g, m, cfg.params) + dt * cfg.params.nu * g.k2(m);
  }
  return out;
}

// Everything on the right of the adjoint recursion except the transport term.
SpectralField adjoint_rhs_base(const SpectralField& y, const SpectralField& next, const SpectralField& yd, int n,
                               const WienerPath& path, const TrackingTarget& target, const SimConfig& cfg) {
  const double dt = cfg.dt();
  auto rhs = v_apply(next, cfg.params);
  if (cfg.model.active()) rhs += jacobian_increment_transpose(n * dt, y, next, path.at(n), cfg.model);
  rhs.axpy(dt, tracking_source(y, yd, target.norm, cfg.params));
  return rhs;
}

double rel_gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

}  // namespace

AdjointTrajectory pathwise_adjoint(const Trajectory& base, const TrackingTarget& target, const WienerPath& path,
                                   const SimConfig& cfg) {
  const int N = base.steps();
  AdjointTrajectory mu;
  mu.fields.assign(static_cast<std::size_t>(N) + 1, SpectralField(cfg.grid));
  for (int n = std::min(base.stop_index, N) - 1; n >= 0; --n) {
    const auto& y = base.fields[n];
    const auto& next = mu.fields[n + 1];
    auto rhs = adjoint_rhs_base(y, next, target.at(n), n, path, target, cfg);
    if (cfg.params.nonlinear && !next.is_zero()) rhs.axpy(cfg.dt(), LinearizedOperator(y, cfg.params).apply_transpose(next));
    solve_implicit(rhs, cfg);
    mu.fields[n] = std::move(rhs);
  }
  return mu;
}

SpectralField adjoint_transport(const SpectralField& y, const SpectralField& p, const PhysicalParams& params) {
  require_same_grid(y, p, "adjoint_transport");
  const auto& g = y.grid();
  SpectralField out(g);
  if (!params.nonlinear) return out;
  const int d = g.dim();
  const std::size_t n = g.grid_size();
  const auto s = collocate_state(y, params);
  const auto P = collocate(p);

  SpectralField pgy(g), ygp(g);
  GridArray w(n), u(n), r(n);
  for (int i = 0; i < d; ++i) {
    std::fill(w.begin(), w.end(), 0.0);
    std::fill(u.begin(), u.end(), 0.0);
    std::fill(r.begin(), r.end(), 0.0);
    for (int j = 0; j < d; ++j) {
      const auto& dip = P.grad[j * d + i];    // d_i p_j
      const auto& djv = s.vy.grad[i * d + j];  // d_j v(y)_i
      const auto& djy = s.y.grad[i * d + j];   // d_j y_i
      const auto& djp = P.grad[i * d + j];     // d_j p_i
      for (std::size_t x = 0; x < n; ++x) {
        w[x] += dip[x] * s.vy.val[j][x] + P.val[j][x] * djv[x];
        u[x] += P.val[j][x] * djy[x];
        r[x] += s.y.val[j][x] * djp[x];
      }
    }
    add_from_grid(w, out, i);
    add_from_grid(u, pgy, i);
    add_from_grid(r, ygp, i);
  }
  out.axpy(-1.0, v_apply(pgy, params));
  out += v_apply(ygp, params);

  const double a12 = params.alpha1 + params.alpha2;
  const double beta = params.beta;
  if (a12 != 0.0 || beta != 0.0) {
    std::vector<GridArray> S(static_cast<std::size_t>(d * d), GridArray(n));
    double Ay[9], Ap[9];
    for (std::size_t x = 0; x < n; ++x) {
      double nrm = 0.0, dot = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          Ay[i * d + j] = s.y.grad[i * d + j][x] + s.y.grad[j * d + i][x];
          Ap[i * d + j] = P.grad[i * d + j][x] + P.grad[j * d + i][x];
        }
      for (int q = 0; q < d * d; ++q) {
        nrm += Ay[q] * Ay[q];
        dot += Ap[q] * Ay[q];
      }
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double t = 0.0;
          for (int m = 0; m < d; ++m) t += Ay[i * d + m] * Ap[m * d + j] + Ap[i * d + m] * Ay[m * d + j];
          S[i * d + j][x] = a12 * t + beta * nrm * Ap[i * d + j] + 2.0 * beta * dot * Ay[i * d + j];
        }
    }
    add_divergence(S, out);
  }
  return leray_project(out);
}

double adjoint_residual(const Trajectory& base, const AdjointTrajectory& mu, const TrackingTarget& target,
                        const WienerPath& path, const SimConfig& cfg) {
  double worst = 0.0;
  for (int n = 0; n < std::min(base.stop_index, base.steps()); ++n) {
    const auto& y = base.fields[n];
    const auto& next = mu.fields[n + 1];
    auto rhs = adjoint_rhs_base(y, next, target.at(n), n, path, target, cfg);
    rhs.axpy(cfg.dt(), adjoint_transport(y, next, cfg.params));
    const auto lhs = implicit_apply(mu.fields[n], cfg);
    const double scale = std::max(max_abs(lhs), max_abs(rhs));
    if (scale > 0.0) worst = std::max(worst, max_abs_difference(lhs, rhs) / scale);
  }
  return worst;
}

DualityReport duality_check(const SpectralField& y0, const ControlField& U, const ControlField& psi,
                            const TrackingTarget& target, const SimConfig& cfg, int n_samples) {
  DualityReport rep;
  rep.samples.resize(static_cast<std::size_t>(n_samples));
  const double dt = cfg.dt();
  parallel_for(n_samples, cfg.workers, [&](int i) {
    const auto path = cfg.path(static_cast<std::uint64_t>(i));
    const auto base = simulate(y0, U, path, cfg);
    const auto z = simulate_tangent(base, psi, path, cfg);
    const auto mu = pathwise_adjoint(base, target, path, cfg);
    auto& s = rep.samples[static_cast<std::size_t>(i)];
    s.stop_index = base.stop_index;
    for (int n = 0; n < std::min(base.stop_index, cfg.steps); ++n) {
      s.lhs += dt * inner(psi.at(n), mu.fields[n + 1]);
      s.rhs += dt * inner(tracking_source(base.fields[n], target.at(n), target.norm, cfg.params), z.fields[n]);
    }
    s.rel_gap = rel_gap(s.lhs, s.rhs);
    s.residual = adjoint_residual(base, mu, target, path, cfg);
  });
  for (const auto& s : rep.samples) {
    rep.max_rel_gap = std::max(rep.max_rel_gap, s.rel_gap);
    rep.max_residual = std::max(rep.max_residual, s.residual);
  }
  return rep;
}

BsdeReport adapted_bsde(const SpectralField& y0, const ControlField& U, const ControlField& psi,
                        const TrackingTarget& target, const SimConfig& cfg, int n_samples) {
  using Eigen::MatrixXd;
  const auto& g = cfg.grid;
  const int N = cfg.steps;
  const int K = cfg.model.active() ? cfg.model.K : 0;
  const double dt = cfg.dt();
  const auto R = static_cast<Eigen::Index>(real_dof_count(g));
  const auto S = static_cast<Eigen::Index>(n_samples);

  // Forward sweep: states as real dofs per step, increments, stops, the
  // tangent side of the duality and the pathwise mu_0.
  std::vector<MatrixXd> Y(static_cast<std::size_t>(N), MatrixXd::Zero(S, R));
  std::vector<std::vector<double>> dW(static_cast<std::size_t>(n_samples));
  std::vector<int> stop(static_cast<std::size_t>(n_samples));
  std::vector<double> rhs(static_cast<std::size_t>(n_samples), 0.0), lhs(rhs);
  MatrixXd mu0(S, R);
  parallel_for(n_samples, cfg.workers, [&](int i) {
    const auto path = cfg.path(static_cast<std::uint64_t>(i));
    const auto base = simulate(y0, U, path, cfg);
    const auto z = simulate_tangent(base, psi, path, cfg);
    stop[i] = base.stop_index;
    dW[i] = path.increments;
    for (int n = 0; n < N; ++n) {
      const auto dofs = to_real_dofs(base.fields[n]);
      Y[n].row(i) = Eigen::Map<const Eigen::RowVectorXd>(dofs.data(), R);
    }
    for (int n = 0; n < std::min(stop[i], N); ++n)
      rhs[i] += dt * inner(tracking_source(base.fields[n], target.at(n), target.norm, cfg.params), z.fields[n]);
    const auto mu = pathwise_adjoint(base, target, path, cfg);
    const auto d0 = to_real_dofs(mu.fields[0]);
    mu0.row(i) = Eigen::Map<const Eigen::RowVectorXd>(d0.data(), R);
  });

  BsdeReport rep;
  rep.samples = n_samples;
  rep.features = static_cast<int>(R) + 1;

  MatrixXd Pnext = MatrixXd::Zero(S, R);  // p_N = 0
  rep.terminal_max = Pnext.cwiseAbs().maxCoeff();
  MatrixXd Pcur(S, R);
  for (int n = N - 1; n >= 0; --n) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < S; ++i)
      if (n < stop[i]) active.push_back(i);
    const auto A = static_cast<Eigen::Index>(active.size());
    Pcur.setZero();
    MatrixXd Q = MatrixXd::Zero(S, R * K);
    if (A > 0) {
      // Standardized features; constant columns are zeroed and dropped by the
      // rank-revealing solve.
      MatrixXd Phi(A, R + 1);
      Phi.col(0).setOnes();
      for (Eigen::Index c = 0; c < R; ++c) {
        Eigen::VectorXd col(A);
        for (Eigen::Index r = 0; r < A; ++r) col[r] = Y[n](active[r], c);
        const double mean = col.mean();
        const double sd = std::sqrt((col.array() - mean).square().mean());
        Phi.col(c + 1) = sd > 1e-14 * (1.0 + std::abs(mean)) ? Eigen::VectorXd((col.array() - mean) / sd)
                                                              : Eigen::VectorXd::Zero(A);
      }
      MatrixXd T(A, R * (1 + K));
      for (Eigen::Index r = 0; r < A; ++r) {
        const auto i = active[r];
        T.block(r, 0, 1, R) = Pnext.row(i);
        for (int k = 0; k < K; ++k) T.block(r, R * (1 + k), 1, R) = Pnext.row(i) * (dW[i][n * K + k] / dt);
      }
      Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(Phi);
      const MatrixXd F = Phi * cod.solve(T);
      if (cod.rank() > 0) {
        Eigen::JacobiSVD<MatrixXd> svd(Phi);
        const auto& sv = svd.singularValues();
        rep.max_condition = std::max(rep.max_condition, sv[0] / sv[cod.rank() - 1]);
      }
      if (K > 0) rep.terminal_max = std::max(rep.terminal_max, n == N - 1 ? F.rightCols(R * K).cwiseAbs().maxCoeff() : 0.0);
      parallel_for(static_cast<int>(A), cfg.workers, [&](int r) {
        const auto i = active[r];
        SpectralField y(g), Ep(g);
        std::vector<double> buf(static_cast<std::size_t>(R));
        Eigen::Map<Eigen::RowVectorXd>(buf.data(), R) = Y[n].row(i);
        from_real_dofs(buf, y);
        Eigen::Map<Eigen::RowVectorXd>(buf.data(), R) = F.block(r, 0, 1, R);
        from_real_dofs(buf, Ep);
        auto p = v_apply(Ep, cfg.params);
        if (cfg.params.nonlinear) p.axpy(dt, LinearizedOperator(y, cfg.params).apply_transpose(Ep));
        if (K > 0) {
          std::vector<SpectralField> q(static_cast<std::size_t>(K), SpectralField(g));
          for (int k = 0; k < K; ++k) {
            Eigen::Map<Eigen::RowVectorXd>(buf.data(), R) = F.block(r, R * (1 + k), 1, R);
            from_real_dofs(buf, q[k]);
            Q.block(i, R * k, 1, R) = F.block(r, R * (1 + k), 1, R);
          }
          p.axpy(dt, apply_G_star(n * dt, y, q, cfg.model));
        }
        p.axpy(dt, tracking_source(y, target.at(n), target.norm, cfg.params));
        solve_implicit(p, cfg);
        const auto dofs = to_real_dofs(p);
        Pcur.row(i) = Eigen::Map<const Eigen::RowVectorXd>(dofs.data(), R);
        // Pairing with psi_n uses p_{n+1}.
        SpectralField pn(g);
        Eigen::Map<Eigen::RowVectorXd>(buf.data(), R) = Pnext.row(i);
        from_real_dofs(buf, pn);
        lhs[i] += dt * inner(psi.at(n), pn);
      });
    }
    for (Eigen::Index i = 0; i < S; ++i) {
      if (n < stop[i]) continue;
      ++rep.post_stop_entries;
      rep.post_stop_max = std::max({rep.post_stop_max, Pcur.row(i).cwiseAbs().maxCoeff(),
                                    K > 0 ? Q.row(i).cwiseAbs().maxCoeff() : 0.0});
    }
    std::swap(Pnext, Pcur);
  }

  std::vector<double> D(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    D[i] = lhs[i] - rhs[i];
    rep.rhs_mean += rhs[i] / n_samples;
  }
  rep.gap = estimate(D);
  const Eigen::RowVectorXd pm = Pnext.colwise().mean(), mm = mu0.colwise().mean();
  const double ref = mm.norm();
  rep.p0_vs_pathwise = ref > 0.0 ? (pm - mm).norm() / ref : (pm - mm).norm();
  return rep;
}

}  // namespace tgf
