#pragma once

// Scalar entropy helpers shared by every module. Natural logarithm
// throughout, with the convention 0 log 0 = 0.

#include <cmath>
#include <stdexcept>

namespace esmlab {

inline constexpr double kTol = 1e-9;        // additive tolerance on identities
inline constexpr double kTightTol = 1e-12;  // exact-arithmetic paths
inline constexpr double kLog2 = 0.6931471805599453;

// -t log t, extended by 0 at the endpoints.
inline double tlog(double t) {
  return (t > 0.0 && t < 1.0) ? -t * std::log(t) : 0.0;
}

// Binary entropy h(t) = -t log t - (1-t) log(1-t), clamped variant for
// internal use where t is known to lie in [0,1] up to rounding.
inline double h(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return -t * std::log(t) - (1.0 - t) * std::log1p(-t);
}

// Checked public entry point.
inline double binary_entropy(double t) {
  if (t < -kTightTol || t > 1.0 + kTightTol)
    throw std::domain_error("binary_entropy: argument outside [0,1]");
  return h(t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t));
}

// Entropy of a three-atom distribution (atoms may be zero).
inline double h3(double a, double b, double c) {
  return tlog(a) + tlog(b) + tlog(c);
}

}  // namespace esmlab
