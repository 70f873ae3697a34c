#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "qhd/errors.hpp"

namespace qhd {

struct ShockParams {
  double gamma = 1.0;
  double mu = 0.0;
  double k = 0.0;
  double P_minus = 0.0;
  double epsilon = 0.0;
  double s = 0.0;
};

struct EndStates {
  double P_plus = 0, P_minus = 0;
  double J_plus = 0, J_minus = 0;
  double A = 0, B = 0;
  double u_plus = 0, u_minus = 0;
  double cs_plus = 0, cs_minus = 0;
  double s_bar = 0;
  bool subsonic_minus = false, subsonic_plus = false;
  bool lax2 = false;
  // carried along so that f(P) and friends need no second argument
  double gamma = 1.0;
  double s = 0.0;
  double epsilon = 0.0;
};

inline void validate(const ShockParams& p) {
  auto bad = [](const std::string& m) { throw DomainError("invalid shock parameters: " + m); };
  if (!(p.gamma >= 1.0)) bad("gamma must be >= 1");
  if (!(p.mu > 0.0)) bad("mu must be > 0");
  if (!(p.k > 0.0)) bad("k must be > 0");
  if (!(p.P_minus > 0.0)) bad("P_minus must be > 0");
  if (!(p.epsilon > 0.0)) bad("epsilon must be > 0");
  if (!(p.epsilon < p.P_minus)) bad("epsilon must be < P_minus");
  if (!(p.s > 0.0)) bad("s must be > 0 (use the reflection y -> -y for s < 0)");
}

inline double sound_speed(double rho, double gamma) {
  if (!(rho > 0.0)) throw DomainError("sound_speed: density must be positive");
  if (!(gamma >= 1.0)) throw DomainError("sound_speed: gamma must be >= 1");
  return std::sqrt(gamma * std::pow(rho, gamma - 1.0));
}

// (P-^g - P+^g)/eps without cancellation for small eps.
inline double power_difference_quotient(double P_minus, double epsilon, double gamma) {
  double r = -epsilon / P_minus;
  return -std::pow(P_minus, gamma) * std::expm1(gamma * std::log1p(r)) / epsilon;
}

inline double flux_constant_A(double P_minus, double epsilon, double gamma) {
  if (!(P_minus > 0.0)) throw DomainError("flux_constant_A: P_minus must be positive");
  if (!(epsilon > 0.0) || !(epsilon < P_minus))
    throw DomainError("flux_constant_A: need 0 < epsilon < P_minus");
  double P_plus = P_minus - epsilon;
  return std::sqrt(P_minus * P_plus) * std::sqrt(power_difference_quotient(P_minus, epsilon, gamma));
}

// s from the right momentum: J+ = s P+ - A.
inline double speed_from_right_momentum(double P_minus, double epsilon, double gamma, double J_plus) {
  double A = flux_constant_A(P_minus, epsilon, gamma);
  return (J_plus + A) / (P_minus - epsilon);
}

inline EndStates lax_end_states(const ShockParams& p) {
  validate(p);
  EndStates e;
  e.gamma = p.gamma;
  e.s = p.s;
  e.epsilon = p.epsilon;
  e.P_minus = p.P_minus;
  e.P_plus = p.P_minus - p.epsilon;
  e.A = flux_constant_A(p.P_minus, p.epsilon, p.gamma);
  e.J_minus = p.s * e.P_minus - e.A;
  e.J_plus = p.s * e.P_plus - e.A;
  e.B = -p.s * e.J_plus + e.J_plus * e.J_plus / e.P_plus + std::pow(e.P_plus, p.gamma);
  e.u_minus = e.J_minus / e.P_minus;
  e.u_plus = e.J_plus / e.P_plus;
  e.cs_minus = sound_speed(e.P_minus, p.gamma);
  e.cs_plus = sound_speed(e.P_plus, p.gamma);
  e.s_bar = std::min(2.0 * e.cs_minus, 0.5 * (p.gamma + 1.0) * e.cs_minus);
  e.subsonic_minus = std::abs(e.u_minus) < e.cs_minus;
  e.subsonic_plus = std::abs(e.u_plus) < e.cs_plus;
  // second-family Lax inequalities plus s above the first family on both sides
  e.lax2 = e.u_plus + e.cs_plus < p.s && p.s < e.u_minus + e.cs_minus &&
           e.u_minus - e.cs_minus < p.s && e.u_plus - e.cs_plus < p.s;
  return e;
}

struct RhResiduals {
  double mass = 0;      // relative to s*P- + |J|
  double momentum = 0;  // relative to the momentum-flux scale
};

inline RhResiduals rankine_hugoniot_residuals(const EndStates& e) {
  auto flux = [&](double P, double J) { return J * J / P + std::pow(P, e.gamma); };
  RhResiduals r;
  double mass_scale = e.s * e.P_minus + std::abs(e.J_minus) + std::abs(e.J_plus);
  r.mass = std::abs(e.s * (e.P_plus - e.P_minus) - (e.J_plus - e.J_minus)) / mass_scale;
  double fp = flux(e.P_plus, e.J_plus), fm = flux(e.P_minus, e.J_minus);
  double mom_scale = std::abs(e.s) * (std::abs(e.J_plus) + std::abs(e.J_minus)) + std::abs(fp) + std::abs(fm);
  r.momentum = std::abs(e.s * (e.J_plus - e.J_minus) - (fp - fm)) / mom_scale;
  return r;
}

// f(P) = P^g - (A s + B) + A^2/P
inline double f_of_P(double P, const EndStates& e) {
  if (!(P > 0.0)) throw DomainError("f_of_P: P must be positive");
  return std::pow(P, e.gamma) - (e.A * e.s + e.B) + e.A * e.A / P;
}

// Same function written through its two roots P+ and P-.
inline double f_of_P_roots(double P, const EndStates& e) {
  if (!(P > 0.0)) throw DomainError("f_of_P_roots: P must be positive");
  double Pp = e.P_plus, Pm = e.P_minus, g = e.gamma;
  double q1 = (std::pow(Pp, g) - std::pow(Pm, g)) / (Pp - Pm);
  double q2 = (std::pow(Pp, g + 1.0) - std::pow(Pm, g + 1.0)) / (Pp - Pm);
  return std::pow(P, g) + (Pm * Pp / P) * q1 - q2;
}

inline double df_of_P(double P, const EndStates& e) {
  return e.gamma * std::pow(P, e.gamma - 1.0) - e.A * e.A / (P * P);
}

inline double d2f_of_P(double P, const EndStates& e) {
  return e.gamma * (e.gamma - 1.0) * std::pow(P, e.gamma - 2.0) + 2.0 * e.A * e.A / (P * P * P);
}

inline double critical_point_P0(const EndStates& e) {
  double q = power_difference_quotient(e.P_minus, e.P_minus - e.P_plus, e.gamma);
  return std::pow(e.P_minus * e.P_plus * q / e.gamma, 1.0 / (e.gamma + 1.0));
}

inline double expansion_A_leading(double P_minus, double epsilon, double gamma) {
  double c = sound_speed(P_minus, gamma);
  return P_minus * c - 0.25 * (gamma + 1.0) * c * epsilon;
}

inline double expansion_P0_leading(double P_minus, double epsilon) { return P_minus - 0.5 * epsilon; }

struct SubsonicityReport {
  bool left_subsonic = false;      // (i)
  bool s_below_2cs = false;        // (ii)
  bool u_minus_small = false;      // (iii), only meaningful for gamma > 1
  bool s_below_gamma_bound = false;// (iv)
  bool gamma_above_one = false;
  bool implication_i_ii = true;
  bool implication_iii_iv = true;
  bool gamma3_i_implies_iii = true;  // only checked when gamma >= 3
};

inline SubsonicityReport check_subsonicity_conditions(const EndStates& e, const ShockParams& p) {
  SubsonicityReport r;
  double c = e.cs_minus;
  r.gamma_above_one = p.gamma > 1.0;
  r.left_subsonic = std::abs(e.u_minus) < c;
  r.s_below_2cs = p.s < 2.0 * c;
  r.u_minus_small = r.gamma_above_one && std::abs(e.u_minus) < 0.5 * (p.gamma - 1.0) * c;
  r.s_below_gamma_bound = p.s < 0.5 * (p.gamma + 1.0) * c;
  r.implication_i_ii = !r.left_subsonic || r.s_below_2cs;
  r.implication_iii_iv = !r.u_minus_small || r.s_below_gamma_bound;
  if (p.gamma >= 3.0) r.gamma3_i_implies_iii = !r.left_subsonic || r.u_minus_small;
  return r;
}

}  // namespace qhd
