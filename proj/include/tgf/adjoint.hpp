#pragma once

#include <string>
#include <vector>

#include "tgf/forward.hpp"
#include "tgf/tangent.hpp"

namespace tgf {

enum class TrackingNorm { l2, v };
std::string to_string(TrackingNorm n);
TrackingNorm tracking_norm_from_string(const std::string& s);

/// Desired state y_d. A single field means the same target at every step.
struct TrackingTarget {
  std::vector<SpectralField> fields;
  TrackingNorm norm = TrackingNorm::l2;
  const SpectralField& at(int n) const {
    return fields.size() == 1 ? fields.front() : fields[static_cast<std::size_t>(n)];
  }
};

// Gradient of 1/2 |y - y_d|^2 in the L2 pairing: y - y_d or v(y - y_d).
SpectralField tracking_source(const SpectralField& y, const SpectralField& yd, TrackingNorm norm,
                              const PhysicalParams& params);
double tracking_density(const SpectralField& y, const SpectralField& yd, TrackingNorm norm,
                        const PhysicalParams& params);

/// Exact transpose of the tangent recursion, so that for every sample
///   sum_{n<s} dt (psi_n, mu_{n+1}) = sum_{n<s} dt (g_n, z_n).
/// mu_N = 0 and mu_n = 0 for n >= s; before the stop
///   (v + dt nu K) mu_n = v(mu_{n+1}) + dt L_{y_n}^T mu_{n+1} + J(y_n)^T mu_{n+1} dW_n + dt g_n.
struct AdjointTrajectory {
  std::vector<SpectralField> fields;  // mu_0 .. mu_N
};

AdjointTrajectory pathwise_adjoint(const Trajectory& base, const TrackingTarget& target, const WienerPath& path,
                                   const SimConfig& cfg);

// Transport operator of the adjoint equation written out term by term:
// P[(grad p)^T v(y) + (p.grad) v(y) - v((p.grad) y) + v((y.grad) p) + div S_y(A_p)],
// S_y(B) = (a1 + a2)(A_y B + B A_y) + beta |A_y|^2 B + 2 beta (B : A_y) A_y.
// It differs from LinearizedOperator::apply_transpose by a gradient only.
SpectralField adjoint_transport(const SpectralField& y, const SpectralField& p, const PhysicalParams& params);

// Largest relative residual of the adjoint recursion when the transpose is
// replaced by adjoint_transport; an independent check of pathwise_adjoint.
double adjoint_residual(const Trajectory& base, const AdjointTrajectory& mu, const TrackingTarget& target,
                        const WienerPath& path, const SimConfig& cfg);

struct DualitySample {
  double lhs = 0.0;  // sum_{n<s} dt (psi_n, mu_{n+1})
  double rhs = 0.0;  // sum_{n<s} dt (g_n, z_n)
  double rel_gap = 0.0;
  double residual = 0.0;
  int stop_index = 0;
};
struct DualityReport {
  std::vector<DualitySample> samples;
  double max_rel_gap = 0.0;
  double max_residual = 0.0;
};

DualityReport duality_check(const SpectralField& y0, const ControlField& U, const ControlField& psi,
                            const TrackingTarget& target, const SimConfig& cfg, int n_samples);

/// Adapted solution of the backward equation by least-squares Monte Carlo.
/// Conditional expectations given F_n are regressions on [1, real dofs of y_n]
/// over the samples still running at step n.
///   q_k(n)  = E_n[p_{n+1} dW_k] / dt
///   p_n     = (v + dt nu K)^{-1} [(v + dt L^T) E_n p_{n+1} + dt G*(y_n) q + dt g_n]
/// q here is the martingale integrand with the sign of the increment; the
/// opposite sign convention is -q.
struct BsdeReport {
  int samples = 0;
  int features = 0;
  double max_condition = 0.0;
  // Per-sample D_i = sum dt (psi_n, p_{n+1}) - sum dt (g_n, z_n).
  Estimate gap;
  double rhs_mean = 0.0;
  // Sup-norms of p and q over terminal and post-stop entries; zero when exact.
  double terminal_max = 0.0;
  double post_stop_max = 0.0;
  int post_stop_entries = 0;
  // |mean p_0 - mean mu_0| relative, against the pathwise adjoint.
  double p0_vs_pathwise = 0.0;
};

BsdeReport adapted_bsde(const SpectralField& y0, const ControlField& U, const ControlField& psi,
                        const TrackingTarget& target, const SimConfig& cfg, int n_samples);

}  // namespace tgf
