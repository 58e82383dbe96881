#include "tgf/tangent.hpp"

#include <cmath>

#include "tgf/nonlinear.hpp"
#include "tgf/parallel.hpp"
#include "tgf/spectral_ops.hpp"

namespace tgf {

// Input channels:  [0,d) z_a | [d, d+d^2) d_b z_a | [d+d^2, 2d+d^2) v(z)_a |
//                  [2d+d^2, 2d+2d^2) d_b v(z)_a      (a*d + b ordering)
// Output channels: [0,d) vector component i | [d, d+d^2) tensor (i, j),
//                  entering component i through d_j.
LinearizedOperator::LinearizedOperator(const SpectralField& y, const PhysicalParams& params)
    : d_(y.dim()), grid_(y.grid()), params_(params) {
  const int d = d_;
  n_in_ = 2 * d + 2 * d * d;
  n_out_ = d + d * d;
  used_in_.assign(static_cast<std::size_t>(n_in_), false);
  used_out_.assign(static_cast<std::size_t>(n_out_), false);
  if (!params.nonlinear) return;
  empty_ = false;
  const std::size_t n = grid_.grid_size();
  C_.assign(n * static_cast<std::size_t>(n_out_ * n_in_), 0.0);
  const auto s = collocate_state(y, params);
  const int G0 = d, V0 = d + d * d, GV0 = 2 * d + d * d;
  const double a12 = params.alpha1 + params.alpha2;
  const double beta = params.beta;
  const bool tensor = a12 != 0.0 || beta != 0.0;

  for (int i = 0; i < d; ++i) {
    used_out_[i] = true;
    for (int j = 0; j < d; ++j) {
      used_in_[GV0 + i * d + j] = used_in_[j] = used_in_[V0 + j] = used_in_[G0 + j * d + i] = true;
    }
  }
  if (tensor) {
    for (int q = 0; q < d * d; ++q) used_out_[d + q] = used_in_[G0 + q] = true;
  }

  double Ay[9], Az[9], S[9];
  for (std::size_t x = 0; x < n; ++x) {
    double* c = &C_[x * static_cast<std::size_t>(n_out_ * n_in_)];
    auto at = [&](int o, int in) -> double& { return c[o * n_in_ + in]; };
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        at(i, GV0 + i * d + j) -= s.y.val[j][x];              // -(y.grad) v(z)
        at(i, j) -= s.vy.grad[i * d + j][x];                  // -(z.grad) v(y)
        at(i, V0 + j) -= s.y.grad[j * d + i][x];              // -v(z)_j grad y_j
        at(i, G0 + j * d + i) -= s.vy.val[j][x];              // -v(y)_j grad z_j
      }
    if (!tensor) continue;
    double nrm = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Ay[i * d + j] = s.y.grad[i * d + j][x] + s.y.grad[j * d + i][x];
        nrm += Ay[i * d + j] * Ay[i * d + j];
      }
    // Column (a, b): response of the stress to a unit d_b z_a.
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        for (int q = 0; q < d * d; ++q) Az[q] = 0.0;
        Az[a * d + b] += 1.0;
        Az[b * d + a] += 1.0;
        double dot = 0.0;
        for (int q = 0; q < d * d; ++q) dot += Az[q] * Ay[q];
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            double t = 0.0;
            for (int m = 0; m < d; ++m) t += Ay[i * d + m] * Az[m * d + j] + Az[i * d + m] * Ay[m * d + j];
            S[i * d + j] = a12 * t + beta * nrm * Az[i * d + j] + 2.0 * beta * dot * Ay[i * d + j];
          }
        for (int q = 0; q < d * d; ++q) at(d + q, G0 + a * d + b) += S[q];
      }
  }
}

int LinearizedOperator::in_comp(int ch) const {
  const int d = d_;
  if (ch < d) return ch;
  if (ch < d + d * d) return (ch - d) / d;
  if (ch < 2 * d + d * d) return ch - d - d * d;
  return (ch - 2 * d - d * d) / d;
}

Complex LinearizedOperator::in_mult(int ch, std::size_t m) const {
  const int d = d_;
  const auto& k = grid_.wave_vector(m);
  if (ch < d) return 1.0;
  if (ch < d + d * d) return Complex(0.0, k[(ch - d) % d]);
  const double vs = v_symbol(grid_, m, params_);
  if (ch < 2 * d + d * d) return vs;
  return Complex(0.0, k[(ch - 2 * d - d * d) % d] * vs);
}

int LinearizedOperator::out_comp(int ch) const { return ch < d_ ? ch : (ch - d_) / d_; }

Complex LinearizedOperator::out_mult(int ch, std::size_t m) const {
  if (ch < d_) return 1.0;
  return Complex(0.0, grid_.wave_vector(m)[(ch - d_) % d_]);
}

SpectralField LinearizedOperator::apply(const SpectralField& z) const {
  require_same_grid(z, SpectralField(grid_), "LinearizedOperator::apply");
  SpectralField out(grid_);
  if (empty_) return out;
  const std::size_t n = grid_.grid_size();
  std::vector<GridArray> in(static_cast<std::size_t>(n_in_));
  for (int ch = 0; ch < n_in_; ++ch)
    if (used_in_[ch]) in[ch] = channel_to_grid(z, in_comp(ch), [&](std::size_t m) { return in_mult(ch, m); });
  GridArray o(n);
  for (int oc = 0; oc < n_out_; ++oc) {
    if (!used_out_[oc]) continue;
    for (std::size_t x = 0; x < n; ++x) {
      const double* c = &C_[(x * n_out_ + oc) * n_in_];
      double s = 0.0;
      for (int ch = 0; ch < n_in_; ++ch)
        if (used_in_[ch]) s += c[ch] * in[ch][x];
      o[x] = s;
    }
    add_from_grid(o, out, out_comp(oc), [&](std::size_t m) { return out_mult(oc, m); });
  }
  return leray_project(out);
}

SpectralField LinearizedOperator::apply_transpose(const SpectralField& p) const {
  require_same_grid(p, SpectralField(grid_), "LinearizedOperator::apply_transpose");
  SpectralField out(grid_);
  if (empty_) return out;
  const std::size_t n = grid_.grid_size();
  std::vector<GridArray> in(static_cast<std::size_t>(n_out_));
  for (int oc = 0; oc < n_out_; ++oc)
    if (used_out_[oc])
      in[oc] = channel_to_grid(p, out_comp(oc), [&](std::size_t m) { return std::conj(out_mult(oc, m)); });
  GridArray o(n);
  for (int ch = 0; ch < n_in_; ++ch) {
    if (!used_in_[ch]) continue;
    for (std::size_t x = 0; x < n; ++x) {
      const double* c = &C_[x * n_out_ * n_in_ + ch];
      double s = 0.0;
      for (int oc = 0; oc < n_out_; ++oc)
        if (used_out_[oc]) s += c[oc * n_in_] * in[oc][x];
      o[x] = s;
    }
    add_from_grid(o, out, in_comp(ch), [&](std::size_t m) { return std::conj(in_mult(ch, m)); });
  }
  return leray_project(out);
}

SpectralField linearized_drift(const SpectralField& y, const SpectralField& z, const SpectralField& psi,
                               const PhysicalParams& params) {
  require_same_grid(y, z, "linearized_drift");
  require_same_grid(y, psi, "linearized_drift");
  SpectralField out = LinearizedOperator(y, params).apply(z);
  out.axpy(params.nu, laplacian(z));
  out += leray_project(psi);
  return out;
}

TangentTrajectory simulate_tangent(const Trajectory& base, const ControlField& psi, const WienerPath& path,
                                   const SimConfig& cfg) {
  const int N = cfg.steps;
  if (base.steps() != N || path.steps != N || psi.steps() < N)
    throw std::invalid_argument("tangent inputs disagree on the number of steps");
  const auto& g = cfg.grid;
  const auto& p = cfg.params;
  const double dt = cfg.dt();
  TangentTrajectory tt;
  tt.fields.reserve(static_cast<std::size_t>(N) + 1);
  tt.fields.emplace_back(g);
  for (int n = 0; n < N; ++n) {
    const auto& z = tt.fields.back();
    if (n >= base.stop_index) {
      tt.fields.push_back(z);
      continue;
    }
    const auto& y = base.fields[static_cast<std::size_t>(n)];
    SpectralField rhs = v_apply(z, p);
    if (p.nonlinear) rhs.axpy(dt, LinearizedOperator(y, p).apply(z));
    rhs.axpy(dt, leray_project(psi.at(n)));
    if (cfg.model.active()) rhs += jacobian_increment(n * dt, y, z, path.at(n), cfg.model);
    for (int a = 0; a < g.dim(); ++a) {
      auto c = rhs.component(a);
      for (std::size_t m = 0; m < g.mode_count(); ++m) c[m] /= v_symbol(g, m, p) + dt * p.nu * g.k2(m);
    }
    tt.fields.push_back(std::move(rhs));
  }
  return tt;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GateauxReport gateaux_check(const SpectralField& y0, const ControlField& U, const ControlField& psi,
                            const SimConfig& cfg, const std::vector<double>& rhos, int n_samples) {
  const std::size_t R = rhos.size();
  struct Slot {
    std::vector<double> err;
    std::vector<int> mismatch;
    double bound = 0.0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n_samples));
  const double dt = cfg.dt();
  parallel_for(n_samples, cfg.workers, [&](int i) {
    auto& sl = slots[static_cast<std::size_t>(i)];
    const auto path = cfg.path(static_cast<std::uint64_t>(i));
    const auto base = simulate(y0, U, path, cfg);
    const auto z = simulate_tangent(base, psi, path, cfg);
    double zsup = 0.0, psum = 0.0;
    for (int n = 0; n <= cfg.steps; ++n) zsup = std::max(zsup, std::pow(v_norm(z.fields[n], cfg.params), cfg.p_exp));
    for (int n = 0; n < cfg.steps; ++n) psum += dt * std::pow(l2_norm(psi.at(n)), cfg.p_exp);
    sl.bound = psum > 0.0 ? zsup / psum : 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      ControlField Ur = U;
      Ur.axpy(rhos[r], psi);
      const auto yr = simulate(y0, Ur, path, cfg);
      const int s = std::min(base.stop_index, yr.stop_index);
      double e = 0.0;
      for (int n = 0; n <= s; ++n) {
        auto q = yr.fields[n] - base.fields[n];
        q *= 1.0 / rhos[r];
        q -= z.fields[n];
        e = std::max(e, std::pow(v_norm(q, cfg.params), 2));
      }
      sl.err.push_back(e);
      sl.mismatch.push_back(base.stop_index != yr.stop_index);
    }
  });
  GateauxReport rep;
  rep.samples = n_samples;
  for (std::size_t r = 0; r < R; ++r) {
    GateauxRow row;
    row.rho = rhos[r];
    for (const auto& sl : slots) {
      row.error += sl.err[r] / n_samples;
      row.stop_mismatches += sl.mismatch[r];
    }
    rep.rows.push_back(row);
  }
  for (std::size_t r = 1; r < R; ++r)
    rep.rows[r].slope = std::log(rep.rows[r].error / rep.rows[r - 1].error) / std::log(rhos[r] / rhos[r - 1]);
  std::vector<double> xs, ys;
  for (const auto& row : rep.rows) {
    xs.push_back(row.rho);
    ys.push_back(row.error);
  }
  if (R >= 2) rep.fitted_slope = loglog_slope(xs, ys);
  for (const auto& sl : slots) rep.tangent_bound_ratio += sl.bound / n_samples;
  return rep;
}

}  // namespace tgf
