#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tgf/control_field.hpp"
#include "tgf/noise.hpp"
#include "tgf/params.hpp"
#include "tgf/spectral_field.hpp"

namespace tgf {

struct SimConfig {
  WaveGrid grid{2, 8};
  double T = 1.0;
  int steps = 100;
  std::uint64_t seed = 1;
  double M = 1e3;      // stopping threshold on |y|_{W^{2,4}}
  double p_exp = 8.0;  // integrability exponent, > 2 (d + 1)
  PhysicalParams params;
  NoiseModel model;
  double blowup_factor = 10.0;
  int workers = 1;

  double dt() const { return T / steps; }
  void validate() const;
  WienerPath path(std::uint64_t sample) const;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(int step, double norm, double limit);
  int step;
  double norm;
};

/// y_0..y_N with y frozen from stop_index on.
struct Trajectory {
  std::vector<SpectralField> fields;
  int stop_index = 0;
  std::vector<double> w24_trace;
  int steps() const { return static_cast<int>(fields.size()) - 1; }
};

// One semi-implicit Euler-Maruyama step from t:
// (v + dt nu K) y+ = v(y) + dt N(y, U_t) + G(y) dW, solved mode by mode.
SpectralField step(const SpectralField& y, const SpectralField& U_t, std::span<const double> dW, double t,
                   const SimConfig& cfg);

Trajectory simulate(const SpectralField& y0, const ControlField& U, const WienerPath& path, const SimConfig& cfg);

struct Estimate {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  // 95 %, normal approximation
  double std_error = 0.0;
};
Estimate estimate(const std::vector<double>& xs);

struct EnsembleStats {
  int samples = 0;
  int completed = 0;
  std::vector<std::string> aborts;
  Estimate sup_v2;          // E sup_{n <= s} |y_n|_V^2
  Estimate dissipation;     // E sum_{n < s} dt |D y_n|^2
  Estimate deformation4;    // E sum_{n < s} dt int |A(y_n)|^4
  Estimate sup_wtilde_p;    // E sup_{n <= s} |y_n|_{W~}^p
  std::vector<int> stop_histogram;  // count per stop index 0..N
  // Per-step distribution of |y_n|_V across samples.
  std::vector<double> v_mean, v_q10, v_q50, v_q90;
};

EnsembleStats ensemble(const SpectralField& y0, const ControlField& U, const SimConfig& cfg, int n_samples);

struct StabilityReport {
  int samples = 0;
  double p = 2.0;
  double epsilon = 1.0;
  double numerator_v = 0.0;  // E sup |y1 - y2|_V^p over n <= min(s1, s2)
  double numerator_w = 0.0;  // E sup |y1 - y2|_W^p
  double denominator = 0.0;  // E sum_{n < min(s1,s2)} dt |U1 - U2|_2^p
  // Extra term of the W estimate: |y1|_{L^r(H^3)}^{p (d + eps)} |y1 - y2|_{L^r(V)}^p,
  // r = p (d + 1 + eps).
  double interpolation_term = 0.0;
  double ratio_v = 0.0;
  double ratio_w = 0.0;
};

// Common random numbers: sample i of both runs uses cfg.path(i).
StabilityReport stability_probe(const ControlField& U1, const ControlField& U2, const SpectralField& y0,
                                const SimConfig& cfg, int n_samples, double p = 2.0, double epsilon = 1.0);

// Fraction of samples with different stop indices under U1 and U2.
double stop_disagreement(const ControlField& U1, const ControlField& U2, const SpectralField& y0, const SimConfig& cfg,
                         int n_samples);

struct StopProbeRow {
  double rho = 0.0;
  int disagreements = 0;
  double probability = 0.0;
  double ratio = 0.0;  // probability / rho
};
struct StopProbeReport {
  int samples = 0;
  std::vector<StopProbeRow> rows;  // in the order of the rho list
  bool nonincreasing = false;      // probability along decreasing rho
  bool ratio_decreased = false;    // ratio at smallest rho < ratio at largest
};

// U versus U + rho psi for each rho (given in decreasing order).
StopProbeReport stop_time_probe(const ControlField& U, const ControlField& psi, const SpectralField& y0,
                                const SimConfig& cfg, int n_samples, const std::vector<double>& rhos);

}  // namespace tgf
