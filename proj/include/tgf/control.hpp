#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tgf/adjoint.hpp"

namespace tgf {

/// Ball of radius `radius` in L^p(0,T; H^1).
struct AdmissibleSet {
  double radius = 10.0;
};

/// Sample-average tracking problem. Sample i always uses cfg.path(i), so the
/// objective is a deterministic function of U.
struct ControlProblem {
  SimConfig cfg;
  SpectralField y0;
  TrackingTarget target;
  double lambda = 1e-2;
  int samples = 16;
  AdmissibleSet set;
};

struct CostReport {
  double tracking = 0.0;  // 1/2 E sum_{n<s} dt |y_n - y_d,n|^2
  double penalty = 0.0;   // lambda/p sum_n dt |U_n|_{H^1}^p
  double total = 0.0;
  std::vector<int> stop_histogram;
  int samples = 0;
  int stopped = 0;  // samples with s < N
};

CostReport eval_cost(const ControlProblem& pb, const ControlField& U);

double penalty_value(const ControlField& U, double lambda, double dt);
// lambda |U_n|^{p-2} (I - Laplacian) U_n.
ControlField penalty_gradient(const ControlField& U, double lambda);

struct GradientReport {
  ControlField gradient;  // L2(dt) representative of dJ
  CostReport cost;
  // Some sample stopped, so the stopping indicator was held fixed.
  bool frozen_indicator = false;
};

GradientReport cost_gradient(const ControlProblem& pb, const ControlField& U);

// dJ[psi] assembled from tangent runs, sum dt (g_n, z_n) plus the penalty
// term, without the adjoint.
double tangent_derivative(const ControlProblem& pb, const ControlField& U, const ControlField& psi);
// (J(U + rho psi) - J(U - rho psi)) / (2 rho).
double central_difference(const ControlProblem& pb, const ControlField& U, const ControlField& psi, double rho);

// Radial projection onto the admissible ball.
ControlField project_admissible(const ControlField& U, const AdmissibleSet& set, double dt);

struct OptimizerOptions {
  int max_iter = 200;
  double tol = 1e-5;        // on the gradient-map norm |U - P(U - grad)|
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 40;
  double initial_step = 1.0;
  bool barzilai_borwein = true;
};

struct IterateLog {
  int iter = 0;
  double cost = 0.0;
  double tracking = 0.0;
  double penalty = 0.0;
  double grad_norm = 0.0;  // gradient-map norm at this iterate
  double step = 0.0;       // accepted step (0 on the final row)
  double stopped_fraction = 0.0;
  int backtracks = 0;
};

struct OptimizeResult {
  ControlField U;
  std::vector<IterateLog> log;
  bool converged = false;
  bool line_search_failed = false;
};

OptimizeResult optimize(const ControlProblem& pb, const ControlField& U0, const OptimizerOptions& opt,
                        const std::function<void(const IterateLog&)>& on_iterate = {});

struct ResidualDirection {
  std::string kind;  // interior, boundary, coordinate+, coordinate-, descent
  double value = 0.0;
};
struct ResidualReport {
  double residual = 0.0;  // min over directions of dJ[psi - U]
  int worst = -1;
  std::vector<ResidualDirection> directions;
};

ResidualReport optimality_residual(const ControlProblem& pb, const ControlField& U, int n_dirs,
                                   std::uint64_t seed = 1);

}  // namespace tgf
