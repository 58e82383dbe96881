#include "tgf/control_field.hpp"

#include <cmath>
#include <stdexcept>

#include "tgf/spectral_ops.hpp"

namespace tgf {

ControlField::ControlField(const WaveGrid& grid, int steps, double p_exp)
    : grid_(grid), p_exp_(p_exp), values_(static_cast<std::size_t>(steps), SpectralField(grid)) {}

ControlField ControlField::from_fields(std::vector<SpectralField> values, double p_exp) {
  if (values.empty()) throw std::invalid_argument("control needs at least one step");
  ControlField c(values.front().grid(), static_cast<int>(values.size()), p_exp);
  for (std::size_t n = 0; n < values.size(); ++n) c.set(static_cast<int>(n), values[n]);
  return c;
}

void ControlField::set(int n, const SpectralField& u) {
  if (!(u.grid() == grid_)) throw GridMismatch("control value on a different grid");
  values_.at(static_cast<std::size_t>(n)) = leray_project(u);
}

std::vector<double> ControlField::h1_trace() const {
  std::vector<double> t;
  t.reserve(values_.size());
  for (const auto& u : values_) t.push_back(h1_norm(u));
  return t;
}

double ControlField::norm(double dt) const {
  double s = 0.0;
  for (double h : h1_trace()) s += dt * std::pow(h, p_exp_);
  return std::pow(s, 1.0 / p_exp_);
}

ControlField& ControlField::axpy(double s, const ControlField& x) {
  if (x.steps() != steps()) throw std::invalid_argument("control step counts differ");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n].axpy(s, x.values_[n]);
  return *this;
}

ControlField& ControlField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

bool ControlField::is_zero() const {
  for (const auto& v : values_)
    if (!v.is_zero()) return false;
  return true;
}

double control_dot(const ControlField& a, const ControlField& b, double dt) {
  if (a.steps() != b.steps()) throw std::invalid_argument("control step counts differ");
  double s = 0.0;
  for (int n = 0; n < a.steps(); ++n) s += dt * inner(a.at(n), b.at(n));
  return s;
}

}  // namespace tgf
