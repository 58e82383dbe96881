#pragma once

#include <vector>

#include "tgf/forward.hpp"
#include "tgf/transform.hpp"

namespace tgf {

/// Linearization of explicit_drift at a fixed state y.
///
/// Every term has the form P D_out F [ C(x) E D_in z ]: D_in maps z to the
/// channels (z, grad z, v(z), grad v(z)), C(x) is a real matrix per node built
/// from y, and D_out sends vector channels to components and tensor channels
/// through a divergence. apply_transpose runs the same pieces backwards with
/// conjugated multipliers and C^T, so it is the exact transpose in the
/// coefficient pairing, independent of quadrature accuracy.
class LinearizedOperator {
 public:
  LinearizedOperator(const SpectralField& y, const PhysicalParams& params);

  SpectralField apply(const SpectralField& z) const;
  SpectralField apply_transpose(const SpectralField& p) const;

 private:
  int d_ = 0;
  int n_in_ = 0;
  int n_out_ = 0;
  WaveGrid grid_;
  PhysicalParams params_;
  std::vector<double> C_;  // [node][out][in]
  std::vector<bool> used_in_, used_out_;
  bool empty_ = true;

  Complex in_mult(int ch, std::size_t m) const;
  int in_comp(int ch) const;
  Complex out_mult(int ch, std::size_t m) const;
  int out_comp(int ch) const;
};

// P[ L_y z + nu Laplacian z + psi ].
SpectralField linearized_drift(const SpectralField& y, const SpectralField& z, const SpectralField& psi,
                               const PhysicalParams& params);

struct TangentTrajectory {
  std::vector<SpectralField> fields;  // z_0 = 0, ..., z_N
};

// Same scheme as the forward step, linearized along `base`:
// (v + dt nu K) z+ = v(z) + dt (L_{y_n} z + P psi_n) + J(y_n) z dW_n for n < stop,
// z+ = z afterwards.
TangentTrajectory simulate_tangent(const Trajectory& base, const ControlField& psi, const WienerPath& path,
                                   const SimConfig& cfg);

struct GateauxRow {
  double rho = 0.0;
  double error = 0.0;  // E sup_{n <= min(s, s_rho)} |(y_rho - y) / rho - z|_V^2
  double slope = 0.0;  // local log-log slope against the previous row
  int stop_mismatches = 0;
};
struct GateauxReport {
  int samples = 0;
  std::vector<GateauxRow> rows;
  double fitted_slope = 0.0;  // least-squares slope over all rows
  // sup |z|_V^p / sum dt |psi|_2^p, averaged over samples.
  double tangent_bound_ratio = 0.0;
};

GateauxReport gateaux_check(const SpectralField& y0, const ControlField& U, const ControlField& psi,
                            const SimConfig& cfg, const std::vector<double>& rhos, int n_samples);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tgf
