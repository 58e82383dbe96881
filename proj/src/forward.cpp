#include "tgf/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tgf/nonlinear.hpp"
#include "tgf/parallel.hpp"
#include "tgf/spectral_ops.hpp"

namespace tgf {

void SimConfig::validate() const {
  params.validate();
  model.validate();
  if (!grid.valid()) throw ConfigError("grid not initialized");
  if (!(T > 0.0) || steps < 1) throw ConfigError("time horizon needs T > 0 and steps >= 1");
  if (!(M > 0.0)) throw ConfigError("stopping threshold M must be positive");
  const double need = 2.0 * (grid.dim() + 1);
  if (!(p_exp > need)) {
    std::ostringstream os;
    os << "p_exp > 2 (d + 1) violated: p_exp = " << p_exp << ", 2 (d + 1) = " << need;
    throw ConfigError(os.str());
  }
  if (!(blowup_factor > 1.0)) throw ConfigError("blowup_factor must exceed 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

WienerPath SimConfig::path(std::uint64_t sample) const { return sample_path(seed, sample, dt(), steps, model.K); }

BlowUpError::BlowUpError(int step_, double norm_, double limit)
    : std::runtime_error("blow-up guard tripped at step " + std::to_string(step_) + ": |y|_{W^{2,4}} = " +
                         std::to_string(norm_) + " exceeds " + std::to_string(limit)),
      step(step_),
      norm(norm_) {}

SpectralField step(const SpectralField& y, const SpectralField& U_t, std::span<const double> dW, double t,
                   const SimConfig& cfg) {
  require_same_grid(y, U_t, "step");
  const auto& p = cfg.params;
  const double dt = cfg.dt();
  SpectralField rhs = v_apply(y, p);
  if (p.nonlinear) rhs.axpy(dt, explicit_drift(y, p));
  rhs.axpy(dt, leray_project(U_t));
  if (cfg.model.active()) rhs += noise_increment(t, y, dW, cfg.model);
  const auto& g = y.grid();
  for (int a = 0; a < g.dim(); ++a) {
    auto c = rhs.component(a);
    for (std::size_t m = 0; m < g.mode_count(); ++m) c[m] /= v_symbol(g, m, p) + dt * p.nu * g.k2(m);
  }
  return rhs;
}

Trajectory simulate(const SpectralField& y0, const ControlField& U, const WienerPath& path, const SimConfig& cfg) {
  if (!(y0.grid() == cfg.grid)) throw GridMismatch("initial field not on the configured grid");
  if (U.steps() < cfg.steps) throw std::invalid_argument("control defined on fewer steps than the run");
  if (path.steps != cfg.steps || path.K != cfg.model.K) throw std::invalid_argument("noise path does not match config");
  const int N = cfg.steps;
  const double limit = cfg.blowup_factor * cfg.M;
  Trajectory tr;
  tr.fields.reserve(static_cast<std::size_t>(N) + 1);
  tr.fields.push_back(y0);
  tr.w24_trace.push_back(w24_norm(y0));
  tr.stop_index = N;
  if (tr.w24_trace[0] >= cfg.M) tr.stop_index = 0;
  for (int n = 0; n < N; ++n) {
    if (tr.stop_index <= n) {
      tr.fields.push_back(tr.fields.back());
      tr.w24_trace.push_back(tr.w24_trace.back());
      continue;
    }
    auto next = step(tr.fields.back(), U.at(n), path.at(n), n * cfg.dt(), cfg);
    const double w = w24_norm(next);
    if (!std::isfinite(w) || w > limit) throw BlowUpError(n + 1, w, limit);
    tr.fields.push_back(std::move(next));
    tr.w24_trace.push_back(w);
    if (w >= cfg.M) tr.stop_index = n + 1;
  }
  return tr;
}

Estimate estimate(const std::vector<double>& xs) {
  Estimate e;
  if (xs.empty()) return e;
  double s = 0.0;
  for (double x : xs) s += x;
  e.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double v = 0.0;
    for (double x : xs) v += (x - e.mean) * (x - e.mean);
    v /= static_cast<double>(xs.size() - 1);
    e.std_error = std::sqrt(v / static_cast<double>(xs.size()));
    e.ci_halfwidth = 1.959963984540054 * e.std_error;
  }
  return e;
}

namespace {

double dissipation_density(const SpectralField& y) {
  // |D y|^2 = |grad y|^2 / 2 for divergence-free periodic fields.
  const auto& g = y.grid();
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a)
    for (std::size_t m = 0; m < g.mode_count(); ++m) s += g.k2(m) * std::norm(y(a, m));
  return 0.5 * g.volume() * s;
}

double deformation_fourth(const SpectralField& y) {
  const auto A = deformation_A(y);
  const auto& g = y.grid();
  double s = 0.0;
  for (std::size_t x = 0; x < g.grid_size(); ++x) {
    double n2 = 0.0;
    for (const auto& c : A) n2 += c[x] * c[x];
    s += n2 * n2;
  }
  return s * g.node_weight();
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double h3_norm(const SpectralField& u) {
  const auto& g = u.grid();
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a)
    for (std::size_t m = 0; m < g.mode_count(); ++m) s += std::pow(1.0 + g.k2(m), 3) * std::norm(u(a, m));
  return std::sqrt(g.volume() * s);
}

}  // namespace

EnsembleStats ensemble(const SpectralField& y0, const ControlField& U, const SimConfig& cfg, int n_samples) {
  if (n_samples < 1) throw std::invalid_argument("ensemble needs n_samples >= 1");
  struct Slot {
    bool ok = false;
    std::string error;
    double sup_v2 = 0, diss = 0, a4 = 0, sup_wp = 0;
    int stop = 0;
    std::vector<double> vtrace;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n_samples));
  const double dt = cfg.dt();
  parallel_for(n_samples, cfg.workers, [&](int i) {
    auto& s = slots[static_cast<std::size_t>(i)];
    try {
      const auto tr = simulate(y0, U, cfg.path(static_cast<std::uint64_t>(i)), cfg);
      s.stop = tr.stop_index;
      for (int n = 0; n <= tr.steps(); ++n) {
        const auto& y = tr.fields[static_cast<std::size_t>(n)];
        const auto r = norms(y, cfg.params);
        s.vtrace.push_back(r.v_norm);
        if (n <= tr.stop_index) {
          s.sup_v2 = std::max(s.sup_v2, r.v_norm * r.v_norm);
          s.sup_wp = std::max(s.sup_wp, std::pow(r.wtilde_norm, cfg.p_exp));
        }
        if (n < tr.stop_index) {
          s.diss += dt * dissipation_density(y);
          s.a4 += dt * deformation_fourth(y);
        }
      }
      s.ok = true;
    } catch (const BlowUpError& e) {
      s.error = "sample " + std::to_string(i) + ": " + e.what();
    }
  });

  EnsembleStats st;
  st.samples = n_samples;
  st.stop_histogram.assign(static_cast<std::size_t>(cfg.steps) + 1, 0);
  std::vector<double> a, b, c, d;
  std::vector<std::vector<double>> per_step(static_cast<std::size_t>(cfg.steps) + 1);
  for (const auto& s : slots) {
    if (!s.ok) {
      st.aborts.push_back(s.error);
      continue;
    }
    ++st.completed;
    a.push_back(s.sup_v2);
    b.push_back(s.diss);
    c.push_back(s.a4);
    d.push_back(s.sup_wp);
    ++st.stop_histogram[static_cast<std::size_t>(s.stop)];
    for (std::size_t n = 0; n < s.vtrace.size(); ++n) per_step[n].push_back(s.vtrace[n]);
  }
  st.sup_v2 = estimate(a);
  st.dissipation = estimate(b);
  st.deformation4 = estimate(c);
  st.sup_wtilde_p = estimate(d);
  for (const auto& v : per_step) {
    st.v_mean.push_back(estimate(v).mean);
    st.v_q10.push_back(quantile(v, 0.1));
    st.v_q50.push_back(quantile(v, 0.5));
    st.v_q90.push_back(quantile(v, 0.9));
  }
  return st;
}

StabilityReport stability_probe(const ControlField& U1, const ControlField& U2, const SpectralField& y0,
                                const SimConfig& cfg, int n_samples, double p, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("stability probe epsilon must lie in (0, 1]");
  struct Slot {
    double nv = 0, nw = 0, den = 0, h3 = 0, vr = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n_samples));
  const double dt = cfg.dt();
  const int d = cfg.grid.dim();
  const double r = p * (d + 1 + epsilon);
  parallel_for(n_samples, cfg.workers, [&](int i) {
    const auto path = cfg.path(static_cast<std::uint64_t>(i));
    const auto t1 = simulate(y0, U1, path, cfg);
    const auto t2 = simulate(y0, U2, path, cfg);
    const int s = std::min(t1.stop_index, t2.stop_index);
    auto& sl = slots[static_cast<std::size_t>(i)];
    for (int n = 0; n <= s; ++n) {
      const auto diff = t1.fields[static_cast<std::size_t>(n)] - t2.fields[static_cast<std::size_t>(n)];
      const auto nr = norms(diff, cfg.params);
      sl.nv = std::max(sl.nv, std::pow(nr.v_norm, p));
      sl.nw = std::max(sl.nw, std::pow(nr.w_norm, p));
      if (n < s) {
        sl.den += dt * std::pow(l2_norm(U1.at(n) - U2.at(n)), p);
        sl.h3 += dt * std::pow(h3_norm(t1.fields[static_cast<std::size_t>(n)]), r);
        sl.vr += dt * std::pow(nr.v_norm, r);
      }
    }
  });
  StabilityReport rep;
  rep.samples = n_samples;
  rep.p = p;
  rep.epsilon = epsilon;
  double h3 = 0, vr = 0;
  for (const auto& s : slots) {
    rep.numerator_v += s.nv / n_samples;
    rep.numerator_w += s.nw / n_samples;
    rep.denominator += s.den / n_samples;
    h3 += s.h3 / n_samples;
    vr += s.vr / n_samples;
  }
  rep.interpolation_term = std::pow(h3, p * (d + epsilon) / r) * std::pow(vr, p / r);
  rep.ratio_v = rep.denominator > 0 ? rep.numerator_v / rep.denominator : 0.0;
  const double wden = rep.denominator + rep.interpolation_term;
  rep.ratio_w = wden > 0 ? rep.numerator_w / wden : 0.0;
  return rep;
}

namespace {

std::vector<int> stop_indices(const ControlField& U, const SpectralField& y0, const SimConfig& cfg, int n_samples) {
  std::vector<int> s(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, cfg.workers, [&](int i) {
    s[static_cast<std::size_t>(i)] = simulate(y0, U, cfg.path(static_cast<std::uint64_t>(i)), cfg).stop_index;
  });
  return s;
}

}  // namespace

double stop_disagreement(const ControlField& U1, const ControlField& U2, const SpectralField& y0, const SimConfig& cfg,
                         int n_samples) {
  const auto a = stop_indices(U1, y0, cfg, n_samples);
  const auto b = stop_indices(U2, y0, cfg, n_samples);
  int c = 0;
  for (int i = 0; i < n_samples; ++i) c += a[i] != b[i];
  return double(c) / n_samples;
}

StopProbeReport stop_time_probe(const ControlField& U, const ControlField& psi, const SpectralField& y0,
                                const SimConfig& cfg, int n_samples, const std::vector<double>& rhos) {
  StopProbeReport rep;
  rep.samples = n_samples;
  const auto base = stop_indices(U, y0, cfg, n_samples);
  for (double rho : rhos) {
    ControlField Ur = U;
    Ur.axpy(rho, psi);
    const auto s = stop_indices(Ur, y0, cfg, n_samples);
    StopProbeRow row;
    row.rho = rho;
    for (int i = 0; i < n_samples; ++i) row.disagreements += base[i] != s[i];
    row.probability = double(row.disagreements) / n_samples;
    row.ratio = row.probability / rho;
    rep.rows.push_back(row);
  }
  rep.nonincreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (rep.rows[i].probability > rep.rows[i - 1].probability) rep.nonincreasing = false;
  rep.ratio_decreased = !rep.rows.empty() && rep.rows.back().ratio < rep.rows.front().ratio;
  return rep;
}

}  // namespace tgf
