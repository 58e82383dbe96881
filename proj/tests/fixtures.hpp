#pragma once

#include "tgf/forward.hpp"

namespace fixtures {

inline tgf::SimConfig config(int dim, int n_max, int steps, double T, tgf::NoiseFamily fam, int K = 8,
                             double c0 = 0.2) {
  tgf::SimConfig c;
  c.grid = tgf::WaveGrid(dim, n_max);
  c.T = T;
  c.steps = steps;
  c.seed = 2024;
  c.M = 1e6;
  c.p_exp = dim == 2 ? 8 : 10;
  c.params.nu = 0.05;
  c.params.alpha1 = 0.01;
  c.params.alpha2 = -0.005;
  c.params.beta = 0.01;
  c.model.family = fam;
  c.model.K = fam == tgf::NoiseFamily::zero ? 0 : K;
  c.model.c0 = c0;
  return c;
}

}  // namespace fixtures
