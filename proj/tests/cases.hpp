#pragma once

#include "qhd/shock_data.hpp"

namespace cases {

// Reference dispersive shock: P+ = 0.519, eps = 0.2, J+ = -0.418, gamma = 1.5, mu = 0.1, k = 0.5.
constexpr double kPplus = 0.519, kEps = 0.2, kJplus = -0.418;
constexpr double kGamma = 1.5, kMu = 0.1, kK = 0.5;
constexpr double kPminus = kPplus + kEps;

inline double reference_speed() { return qhd::speed_from_right_momentum(kPminus, kEps, kGamma, kJplus); }

// Same P-, speed and (gamma, mu, k); amplitude varied.
inline qhd::ShockParams reference_family(double eps) {
  return {kGamma, kMu, kK, kPminus, eps, reference_speed()};
}

// Viscosity-dominated companion: mu = 1, k = 0.1, otherwise as the reference family.
inline qhd::ShockParams viscous_family(double eps) { return {kGamma, 1.0, 0.1, kPminus, eps, reference_speed()}; }

}  // namespace cases
