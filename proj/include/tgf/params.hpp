#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace tgf {

struct PhysicalParams {
  double nu = 0.05;
  double alpha1 = 0.01;
  double alpha2 = -0.005;
  double beta = 0.01;
  // Test switch: false drops every nonlinear term from the drift (and hence
  // from the tangent and adjoint operators), leaving the linear v-Stokes flow.
  bool nonlinear = true;

  // Empty when valid; otherwise a human-readable description of the first
  // violated constraint, including |alpha1 + alpha2| <= sqrt(24 nu beta).
  std::optional<std::string> violation() const;
  void validate() const;  // throws ConfigError with violation()
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tgf
