#include "tgf/noise.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "tgf/params.hpp"
#include "tgf/spectral_ops.hpp"
#include "tgf/transform.hpp"

namespace tgf {

std::string to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::zero: return "zero";
    case NoiseFamily::linear: return "linear";
    case NoiseFamily::smooth_nonlinear: return "smooth_nonlinear";
  }
  return "?";
}

NoiseFamily noise_family_from_string(const std::string& s) {
  if (s == "zero") return NoiseFamily::zero;
  if (s == "linear") return NoiseFamily::linear;
  if (s == "smooth_nonlinear" || s == "smooth-nonlinear" || s == "sine") return NoiseFamily::smooth_nonlinear;
  throw ConfigError("unknown noise family '" + s + "' (expected zero, linear or smooth_nonlinear)");
}

double NoiseModel::scale(int k) const { return c0 * std::pow(double(k + 1), -decay); }

std::vector<double> NoiseModel::scales() const {
  std::vector<double> c(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) c[k] = family == NoiseFamily::zero ? 0.0 : scale(k);
  return c;
}

double NoiseModel::time_factor(double t) const { return 1.0 + modulation * std::sin(omega * t); }

std::vector<double> NoiseModel::jacobian_bounds() const {
  auto a = scales();
  for (auto& v : a) v = std::abs(v) * max_time_factor();
  return a;
}

std::vector<double> NoiseModel::remainder_bounds() const {
  // |sin(l + d v) - sin(l) - d cos(l) v| <= d^2 v^2 / 2 componentwise.
  auto b = jacobian_bounds();
  for (auto& v : b) v = family == NoiseFamily::smooth_nonlinear ? 0.5 * v : 0.0;
  return b;
}

double NoiseModel::lipschitz() const {
  double L = 0.0;
  for (double a : jacobian_bounds()) L += a * a;
  return L;
}

void NoiseModel::validate() const {
  if (K < 0) throw ConfigError("noise K must be >= 0");
  if (!(c0 >= 0.0) || !std::isfinite(c0)) throw ConfigError("noise c0 must be finite and >= 0");
  if (!(decay > 0.5)) throw ConfigError("noise decay must exceed 1/2 so that sum c_k^2 converges");
  if (!(std::abs(modulation) < 1.0)) throw ConfigError("noise modulation must satisfy |modulation| < 1");
}

WienerPath sample_path(std::uint64_t seed, std::uint64_t sample, double dt, int steps, int K) {
  if (!(dt > 0.0) || steps < 1 || K < 0) throw std::invalid_argument("sample_path needs dt > 0, steps >= 1, K >= 0");
  WienerPath w{dt, steps, K, {}};
  w.increments.resize(static_cast<std::size_t>(steps) * static_cast<std::size_t>(K));
  if (K == 0) return w;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32), 0x57a7u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> n(0.0, std::sqrt(dt));
  for (auto& v : w.increments) v = n(rng);
  return w;
}

namespace {

// P f(y) for the shared profile.
SpectralField profile(const SpectralField& y, NoiseFamily fam) {
  if (fam == NoiseFamily::linear) return y;  // P F[E y] = y on the retained set
  SpectralField out(y.grid());
  if (fam == NoiseFamily::zero) return out;
  for (int a = 0; a < y.dim(); ++a) {
    auto g = to_grid(y, a);
    for (auto& v : g) v = std::sin(v);
    add_from_grid(g, out, a);
  }
  return leray_project(out);
}

// P (f'(y) v); f' is diagonal, hence also the transpose.
SpectralField profile_jacobian(const SpectralField& y, const SpectralField& v, NoiseFamily fam) {
  if (fam == NoiseFamily::linear) return v;
  SpectralField out(y.grid());
  if (fam == NoiseFamily::zero) return out;
  for (int a = 0; a < y.dim(); ++a) {
    auto g = to_grid(y, a);
    const auto h = to_grid(v, a);
    for (std::size_t x = 0; x < g.size(); ++x) g[x] = std::cos(g[x]) * h[x];
    add_from_grid(g, out, a);
  }
  return leray_project(out);
}

double weight(double t, std::span<const double> dW, const NoiseModel& model) {
  if (static_cast<int>(dW.size()) != model.K) throw std::invalid_argument("noise increment count differs from K");
  double s = 0.0;
  for (int k = 0; k < model.K; ++k) s += model.scale(k) * dW[k];
  return s * model.time_factor(t);
}

}  // namespace

std::vector<SpectralField> apply_G(double t, const SpectralField& y, const NoiseModel& model) {
  const auto f = profile(y, model.family);
  std::vector<SpectralField> cols;
  for (int k = 0; k < model.K; ++k) cols.push_back((model.scales()[k] * model.time_factor(t)) * f);
  return cols;
}

std::vector<SpectralField> apply_grad_G(double t, const SpectralField& y, const SpectralField& v,
                                        const NoiseModel& model) {
  require_same_grid(y, v, "apply_grad_G");
  const auto f = profile_jacobian(y, v, model.family);
  std::vector<SpectralField> cols;
  for (int k = 0; k < model.K; ++k) cols.push_back((model.scales()[k] * model.time_factor(t)) * f);
  return cols;
}

SpectralField apply_G_star(double t, const SpectralField& y, const std::vector<SpectralField>& q,
                           const NoiseModel& model) {
  if (static_cast<int>(q.size()) != model.K)
    throw std::invalid_argument("apply_G_star: expected " + std::to_string(model.K) + " columns, got " +
                                std::to_string(q.size()));
  SpectralField sum(y.grid());
  const auto c = model.scales();
  for (int k = 0; k < model.K; ++k) {
    require_same_grid(y, q[k], "apply_G_star");
    sum.axpy(c[k], q[k]);
  }
  auto out = profile_jacobian(y, sum, model.family);
  out *= model.time_factor(t);
  return out;
}

SpectralField noise_increment(double t, const SpectralField& y, std::span<const double> dW, const NoiseModel& model) {
  if (!model.active()) return SpectralField(y.grid());
  auto f = profile(y, model.family);
  f *= weight(t, dW, model);
  return f;
}

SpectralField jacobian_increment(double t, const SpectralField& y, const SpectralField& v, std::span<const double> dW,
                                 const NoiseModel& model) {
  if (!model.active()) return SpectralField(y.grid());
  auto f = profile_jacobian(y, v, model.family);
  f *= weight(t, dW, model);
  return f;
}

SpectralField jacobian_increment_transpose(double t, const SpectralField& y, const SpectralField& p,
                                           std::span<const double> dW, const NoiseModel& model) {
  // P F diag(cos y) E P is symmetric in the coefficient pairing.
  return jacobian_increment(t, y, p, dW, model);
}

double lipschitz_witness(const NoiseModel& model, int dim, std::uint64_t seed, int pairs) {
  const double L = model.lipschitz();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 2.0);
  std::uniform_real_distribution<double> tt(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    double lhs = 0.0, d2 = 0.0;
    std::vector<double> a(dim), b(dim);
    for (int c = 0; c < dim; ++c) {
      a[c] = n(rng);
      b[c] = n(rng);
      d2 += (a[c] - b[c]) * (a[c] - b[c]);
    }
    const double t = tt(rng);
    for (int k = 0; k < model.K; ++k) {
      const double ck = model.scales()[k] * model.time_factor(t);
      for (int c = 0; c < dim; ++c) {
        const double fa = model.family == NoiseFamily::smooth_nonlinear ? std::sin(a[c]) : a[c];
        const double fb = model.family == NoiseFamily::smooth_nonlinear ? std::sin(b[c]) : b[c];
        lhs += ck * ck * (fa - fb) * (fa - fb);
      }
    }
    if (d2 > 0.0 && L > 0.0) worst = std::max(worst, lhs / (L * d2));
  }
  return worst;
}

double g_star_adjointness(const NoiseModel& model, const WaveGrid& grid, std::uint64_t seed, int triples,
                          double t) {
  double worst = 0.0;
  for (int j = 0; j < triples; ++j) {
    const std::uint64_t base = seed * 1000003 + static_cast<std::uint64_t>(j) * 4099;
    const auto y = random_field(grid, base + 1, 2.0, 1.0);
    const auto u = random_field(grid, base + 2, 1.0, 1.0);
    std::vector<SpectralField> q;
    for (int k = 0; k < model.K; ++k) q.push_back(random_field(grid, base + 3 + 1000 * static_cast<std::uint64_t>(k), 1.0, 1.0));
    const auto cols = apply_grad_G(t, y, u, model);
    double lhs = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) lhs += inner(cols[k], q[k]);
    const double rhs = inner(u, apply_G_star(t, y, q, model));
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace tgf
