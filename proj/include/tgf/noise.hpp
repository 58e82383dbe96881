#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tgf/spectral_field.hpp"

namespace tgf {

enum class NoiseFamily { zero, linear, smooth_nonlinear };

std::string to_string(NoiseFamily f);
NoiseFamily noise_family_from_string(const std::string& s);

/// Diagonal noise sigma_k(t, lambda) = c_k m(t) f(lambda), k = 1..K, with the
/// profile f(lambda) = lambda (linear) or f(lambda)_i = sin(lambda_i) (smooth
/// nonlinear), c_k = c0 k^-decay and m(t) = 1 + modulation sin(omega t).
///
/// Because every column shares the profile, G(y) dW = (sum_k c_k dW_k) m(t) P f(y),
/// which the integrators exploit.
struct NoiseModel {
  NoiseFamily family = NoiseFamily::linear;
  int K = 8;
  double c0 = 0.1;
  double decay = 1.5;
  double modulation = 0.0;
  double omega = 6.283185307179586;

  double scale(int k) const;  // c_k, k zero-based
  std::vector<double> scales() const;
  double time_factor(double t) const;
  double max_time_factor() const { return 1.0 + std::abs(modulation); }
  bool active() const { return family != NoiseFamily::zero && K > 0 && c0 != 0.0; }

  // Bounds on the Jacobian (a_k), the Gateaux remainder (b_k, per unit
  // |v|_inf, exponent gamma = 1) and the aggregate Lipschitz constant L.
  std::vector<double> jacobian_bounds() const;
  std::vector<double> remainder_bounds() const;
  double gamma() const { return 1.0; }
  double lipschitz() const;

  void validate() const;
};

/// Wiener increments dW[step * K + k], N(0, dt) each.
struct WienerPath {
  double dt = 0.0;
  int steps = 0;
  int K = 0;
  std::vector<double> increments;
  std::span<const double> at(int step) const {
    return {increments.data() + static_cast<std::size_t>(step) * static_cast<std::size_t>(K),
            static_cast<std::size_t>(K)};
  }
};

// Stream for (seed, sample) is a 64-bit Mersenne twister keyed by both
// through seed_seq; the increments are drawn in (step, mode) order.
WienerPath sample_path(std::uint64_t seed, std::uint64_t sample, double dt, int steps, int K);

// Columns P f_k(y): K fields.
std::vector<SpectralField> apply_G(double t, const SpectralField& y, const NoiseModel& model);
// Columns P (grad sigma_k(y) v).
std::vector<SpectralField> apply_grad_G(double t, const SpectralField& y, const SpectralField& v,
                                        const NoiseModel& model);
// P sum_k (grad sigma_k(y))^T q_k.
SpectralField apply_G_star(double t, const SpectralField& y, const std::vector<SpectralField>& q,
                           const NoiseModel& model);

// Fused forms used by the integrators: sum_k dW_k times the column.
SpectralField noise_increment(double t, const SpectralField& y, std::span<const double> dW, const NoiseModel& model);
SpectralField jacobian_increment(double t, const SpectralField& y, const SpectralField& v, std::span<const double> dW,
                                 const NoiseModel& model);
// Transpose of jacobian_increment in the coefficient pairing.
SpectralField jacobian_increment_transpose(double t, const SpectralField& y, const SpectralField& p,
                                           std::span<const double> dW, const NoiseModel& model);

// sum_k |sigma_k(t, a) - sigma_k(t, b)|^2 <= L |a - b|^2 on `pairs` random
// vector pairs; returns the largest observed ratio over L.
double lipschitz_witness(const NoiseModel& model, int dim, std::uint64_t seed, int pairs);

// Largest relative defect of (grad G(y) u, q)_HS = (u, G*(y) q) over random
// triples (y, u, q).
double g_star_adjointness(const NoiseModel& model, const WaveGrid& grid, std::uint64_t seed, int triples,
                          double t = 0.4);

}  // namespace tgf
