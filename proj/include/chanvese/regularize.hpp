#pragma once

// Smooth stand-ins for the Heaviside step and the Dirac impulse:
//   H_eps(x)     = 1/2 (1 + 2/pi atan(x / eps))
//   delta_eps(x) = (1/pi) eps / (eps^2 + x^2)
// delta_eps is the exact derivative of H_eps and is positive on the whole
// real line, so every pixel feels the region force.

#include <cmath>
#include <numbers>

#include "chanvese/errors.hpp"

namespace chanvese {

namespace detail {
inline void require_positive_eps(double eps) {
  if (!(eps > 0.0)) throw ParameterError("regularization eps must be positive");
}
}  // namespace detail

inline double heaviside_eps(double x, double eps) {
  detail::require_positive_eps(eps);
  return 0.5 * (1.0 + (2.0 / std::numbers::pi) * std::atan(x / eps));
}

inline double delta_eps(double x, double eps) {
  detail::require_positive_eps(eps);
  return (eps / (eps * eps + x * x)) / std::numbers::pi;
}

}  // namespace chanvese
