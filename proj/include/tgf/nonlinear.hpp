#pragma once

#include <vector>

#include "tgf/params.hpp"
#include "tgf/spectral_field.hpp"
#include "tgf/transform.hpp"

namespace tgf {

/// Collocation values of a field and its first derivatives.
/// grad[a*d + b] holds d_b u_a.
struct VectorGrid {
  int dim = 0;
  std::vector<GridArray> val;
  std::vector<GridArray> grad;
};
VectorGrid collocate(const SpectralField& u, bool with_gradient = true);

/// Everything about the state y that the drift and its linearization read
/// pointwise: y, grad y, v(y), grad v(y).
struct StateGrid {
  VectorGrid y;
  VectorGrid vy;
};
StateGrid collocate_state(const SpectralField& y, const PhysicalParams& params);

// Symmetric tensor A = grad u + grad u^T at each node; entry (i, j) of node x
// is A[i*d + j][x].
std::vector<GridArray> deformation_A(const SpectralField& u);

// b(u, z, w) = int sum_ij u_i d_i z_j w_j, by quadrature on the padded grid.
double trilinear_b(const SpectralField& u, const SpectralField& z, const SpectralField& w);

// Drift without viscosity or control:
//   P[ -(y.grad) v(y) - sum_j v_j grad y_j + div((a1 + a2) A^2 + beta |A|^2 A) ].
SpectralField explicit_drift(const SpectralField& y, const PhysicalParams& params);
SpectralField explicit_drift(const StateGrid& s, const WaveGrid& grid, const PhysicalParams& params);

// Full drift including nu Laplacian y and the projected control.
SpectralField state_drift(const SpectralField& y, const SpectralField& U_t, const PhysicalParams& params);

// Adds the divergence of a tensor given at nodes (T[i*d + j]) to out:
// out_i += sum_j i k_j F[T_ij].
void add_divergence(const std::vector<GridArray>& T, SpectralField& out);

}  // namespace tgf
