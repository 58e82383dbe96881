#pragma once

#include <vector>

#include "tgf/params.hpp"
#include "tgf/spectral_field.hpp"

namespace tgf {

// (I - k k^T / |k|^2) per mode; the mean mode is zeroed.
SpectralField leray_project(const SpectralField& raw);

// v(u) = u - alpha1 Laplacian u, i.e. multiply by 1 + alpha1 |k|^2.
SpectralField v_apply(const SpectralField& u, const PhysicalParams& params);
SpectralField v_inv(const SpectralField& f, const PhysicalParams& params);

SpectralField laplacian(const SpectralField& u);
// Riesz lift of H^1: multiply by 1 + |k|^2.
SpectralField h1_lift(const SpectralField& u);
double h1_norm(const SpectralField& u);

// Per-mode symbol of v.
inline double v_symbol(const WaveGrid& g, std::size_t m, const PhysicalParams& p) { return 1.0 + p.alpha1 * g.k2(m); }

struct NormReport {
  double l2 = 0.0;
  double v_norm = 0.0;
  double w_norm = 0.0;
  double wtilde_norm = 0.0;
  double w24_norm = 0.0;
  double w1inf_norm = 0.0;
};

NormReport norms(const SpectralField& u, const PhysicalParams& params);
double v_norm(const SpectralField& u, const PhysicalParams& params);
// (sum over |alpha| <= 2 and components of int |D^alpha u_a|^4)^(1/4).
double w24_norm(const SpectralField& u);
// max over nodes and |alpha| <= 1 of the Euclidean norm of D^alpha u.
double w1inf_norm(const SpectralField& u);

struct ModeEigenvalue {
  WaveVector k;
  double mu;
};
// mu(k) = 1 + (1 + alpha1 |k|^2) for every retained nonzero mode, sorted by
// |k|^2 (stable in mode order).
std::vector<ModeEigenvalue> basis_eigenvalues(const WaveGrid& grid, const PhysicalParams& params);

// amplitude * d * cos(k.x + phase), where d is `direction` projected
// orthogonal to k and normalized.
SpectralField single_mode(const WaveGrid& grid, const WaveVector& k, const std::vector<double>& direction,
                          double amplitude = 1.0, double phase = 0.0);

}  // namespace tgf
