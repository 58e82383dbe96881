#pragma once

#include <vector>

#include "tgf/spectral_field.hpp"

namespace tgf {

/// Deterministic control U_n, n = 0..steps-1, held constant on [t_n, t_{n+1}).
/// Values are Leray-projected on entry through set()/from_fields().
class ControlField {
 public:
  ControlField() = default;
  ControlField(const WaveGrid& grid, int steps, double p_exp);
  static ControlField from_fields(std::vector<SpectralField> values, double p_exp);

  const WaveGrid& grid() const { return grid_; }
  int steps() const { return static_cast<int>(values_.size()); }
  double p_exp() const { return p_exp_; }
  const SpectralField& at(int n) const { return values_[static_cast<std::size_t>(n)]; }
  void set(int n, const SpectralField& u);
  const std::vector<SpectralField>& values() const { return values_; }

  std::vector<double> h1_trace() const;
  // (sum_n dt |U_n|_{H^1}^p)^(1/p).
  double norm(double dt) const;

  ControlField& axpy(double s, const ControlField& x);
  ControlField& operator*=(double s);
  bool is_zero() const;

 private:
  WaveGrid grid_;
  double p_exp_ = 8.0;
  std::vector<SpectralField> values_;
};

// sum_n dt (a_n, b_n)_{L^2}.
double control_dot(const ControlField& a, const ControlField& b, double dt);

}  // namespace tgf
