#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgf/params.hpp"
#include "tgf/spectral_field.hpp"

namespace tgf {

// (curl v(y) x u, phi) by quadrature.
double curl_cross_pairing(const SpectralField& y, const SpectralField& u, const SpectralField& phi,
                          const PhysicalParams& params);
// (curl v(y x p), phi). In 2D y x p is the scalar y_1 p_2 - y_2 p_1 and
// curl s = (d_2 s, -d_1 s).
double curl_v_cross_pairing(const SpectralField& y, const SpectralField& p, const SpectralField& phi,
                            const PhysicalParams& params);

struct IdentityTolerances {
  double antisymmetry = 1e-11;
  double curl_cross = 1e-11;
  double curl_v_cross = 1e-11;
};

struct IdentityCheck {
  std::string name;
  int trials = 0;
  double max_defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  // Empirical sup of |b(d, y, v(d))| / (|y|_{W^{2,4}} |d|_V^2) on the grid and
  // on a refined grid (n_max + 3).
  double technical_constant = 0.0;
  double technical_constant_refined = 0.0;
  bool all_pass() const;
};

IdentityReport verify_identities(std::uint64_t seed, const PhysicalParams& params, const WaveGrid& grid,
                                 int triples = 20, const IdentityTolerances& tol = {}, int technical_samples = 100);

// Sup of the technical-estimate ratio over random pairs.
double technical_constant(const WaveGrid& grid, std::uint64_t seed, int samples, const PhysicalParams& params);

}  // namespace tgf
