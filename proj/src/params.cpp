#include "tgf/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tgf {

std::optional<std::string> PhysicalParams::violation() const {
  std::ostringstream os;
  os.precision(17);
  if (!(nu >= 0.0)) return "nu >= 0 violated: nu = " + std::to_string(nu);
  if (!(alpha1 >= 0.0)) return "alpha1 >= 0 violated: alpha1 = " + std::to_string(alpha1);
  if (!(beta >= 0.0)) return "beta >= 0 violated: beta = " + std::to_string(beta);
  if (!std::isfinite(alpha2)) return std::string("alpha2 must be finite");
  const double lhs = std::abs(alpha1 + alpha2);
  const double rhs = std::sqrt(24.0 * nu * beta);
  if (lhs > rhs) {
    os << "|alpha1 + alpha2| <= sqrt(24 nu beta) violated: |" << alpha1 << " + " << alpha2 << "| = " << lhs << " > "
       << rhs;
    return os.str();
  }
  return std::nullopt;
}

void PhysicalParams::validate() const {
  if (auto v = violation()) throw ConfigError(*v);
}

}  // namespace tgf
