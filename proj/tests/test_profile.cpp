#include <gtest/gtest.h>

#include "cases.hpp"
#include "oracles.hpp"
#include "qhd/profile.hpp"

using namespace qhd;

namespace {

// ODE residual from closed-form order-14 central differences (nodes away from the ends).
double oracle_residual(const WaveProfile& w, const ShockParams& p, const EndStates& e) {
  double r = 0;
  const int n = int(w.P.size());
  for (int j = 7; j < n - 7; ++j) {
    double d1 = oracle::central_derivative(w.P, w.h, j, 1, 7);
    double d2 = oracle::central_derivative(w.P, w.h, j, 2, 7);
    double P = w.P[j], k2 = p.k * p.k;
    double A = e.A, B = e.B;
    double f = std::pow(P, p.gamma) - (A * p.s + B) + A * A / P;
    r = std::max(r, std::abs(d2 - 2 / k2 * f + 2 * p.s * p.mu / k2 * d1 - d1 * d1 / P));
  }
  return r;
}

}  // namespace

TEST(ReducedTanh, RiccatiIdentity) {
  for (double c : {0.3, 1.0, 46.8}) {
    EXPECT_EQ(reduced_tanh(c, 0.0), 0.0);
    for (int i = 0; i < 1000; ++i) {
      double z = -20.0 / c + 40.0 / c * i / 999.0;
      double R = reduced_tanh(c, z);
      double dz = 1e-4 / c;
      // derivative from the closed form sech^2 as the oracle
      double sech = 1.0 / std::cosh(0.5 * c * z);
      double Rz = -0.25 * c * sech * sech;
      EXPECT_NEAR(Rz - c * (R * R - 0.25), 0.0, 1e-14 * c);
      EXPECT_LT(reduced_tanh(c, z + dz), R + 1e-300);
      EXPECT_GT(R, -0.5 - 1e-16);
      EXPECT_LT(R, 0.5 + 1e-16);
    }
  }
  EXPECT_NEAR(reduced_tanh(2.0, 100.0), -0.5, 1e-15);
  EXPECT_NEAR(reduced_tanh(2.0, -100.0), 0.5, 1e-15);
  EXPECT_THROW(reduced_tanh(0.0, 1.0), DomainError);
}

TEST(ReducedTanh, ProfileIsDecreasing) {
  std::vector<double> z;
  for (int i = 0; i < 101; ++i) z.push_back(-5 + 0.1 * i);
  auto r = reduced_profile(1.5, z);
  for (size_t i = 1; i < r.R.size(); ++i) EXPECT_LT(r.R[i], r.R[i - 1]);
}

TEST(InitialGuess, MidpointAndTails) {
  auto p = cases::reference_family(0.2);
  auto e = lax_end_states(p);
  double L = 40.0 / p.epsilon;
  auto w = initial_guess(p, e, L, 2001);
  EXPECT_DOUBLE_EQ(w.P[1000], 0.5 * (e.P_plus + e.P_minus));
  double c = reduced_coefficient(p);
  // analytic tail: eps * (1/2 - 1/2 tanh(c eps L / 2)) ~ eps * exp(-c eps L)
  double tail = p.epsilon * 0.5 * (1 - std::tanh(0.5 * c * p.epsilon * L));
  EXPECT_LE(w.bc_mismatch, 1e-6);
  EXPECT_NEAR(w.bc_mismatch, tail, 1e-15 + 1e-12 * tail);
  double mx = 0;
  for (double v : w.dP) mx = std::max(mx, std::abs(v));
  EXPECT_NEAR(mx, c * p.epsilon * p.epsilon / 4, 1e-12);
  EXPECT_THROW(initial_guess(p, e, 1.0, 2), DomainError);
}

TEST(SolveProfile, ViscousFamilyIsMonotoneAndAccurate) {
  auto p = cases::viscous_family(0.1);
  auto e = lax_end_states(p);
  auto w = solve_profile(p, e, 200, 4001, 1e-12);
  EXPECT_LE(w.residual_inf, 1e-8);
  EXPECT_LE(oracle_residual(w, p, e), 1e-8);
  EXPECT_LE(w.bc_mismatch, 1e-6);
  auto sh = profile_shape(w, p, e);
  EXPECT_LT(sh.max_dP, 1e-12);
  EXPECT_LE(sh.overshoot, 1e-12);
  EXPECT_LE(sh.J_consistency, 1e-12);
  // strict decrease wherever P is off its end values by more than round-off
  for (size_t j = 1; j < w.P.size(); ++j)
    if (std::abs(w.P[j] - e.P_plus) > 1e-12 && std::abs(w.P[j - 1] - e.P_minus) > 1e-12) EXPECT_LT(w.P[j], w.P[j - 1]);
  EXPECT_DOUBLE_EQ(w.P[2000], 0.5 * (e.P_plus + e.P_minus));
}

TEST(SolveProfile, ReferenceShockResidualAgainstOracle) {
  auto p = cases::reference_family(0.2);
  auto e = lax_end_states(p);
  auto w = solve_profile(p, e, 200, 4001, 1e-12);
  EXPECT_LE(oracle_residual(w, p, e), 1e-8);
  EXPECT_LE(w.residual_inf, 1e-8);
  EXPECT_LE(w.bc_mismatch, 1e-6);
  for (size_t j = 0; j < w.P.size(); ++j) EXPECT_NEAR(w.J[j], p.s * w.P[j] - e.A, 1e-12);
}

TEST(SolveProfile, RefinementOrder) {
  auto p = cases::viscous_family(0.2);
  auto e = lax_end_states(p);
  std::vector<double> res;
  for (int n : {1001, 2001, 4001}) res.push_back(oracle_residual(solve_profile(p, e, 100, n, 1e-13), p, e));
  EXPECT_GT(std::log2(res[0] / res[1]), 2.0);
  EXPECT_GT(std::log2(res[1] / res[2]), 2.0);
}

TEST(SolveProfile, LeftProjectionAndDirichletAgree) {
  auto p = cases::viscous_family(0.1);
  auto e = lax_end_states(p);
  ProfileOptions a, b;
  a.left = LeftBoundary::projection;
  b.left = LeftBoundary::dirichlet;
  auto wa = solve_profile(p, e, 120, 2401, 1e-12, a);
  auto wb = solve_profile(p, e, 120, 2401, 1e-12, b);
  double d = 0;
  for (size_t j = 0; j < wa.P.size(); ++j) d = std::max(d, std::abs(wa.P[j] - wb.P[j]));
  EXPECT_LE(d, 1e-9);
}

TEST(SolveProfile, EvenGridUsesInterpolatedPhase) {
  auto p = cases::viscous_family(0.1);
  auto e = lax_end_states(p);
  auto w = solve_profile(p, e, 100, 2000, 1e-12);
  // cubic interpolation of P at y = 0 hits the midpoint
  int j = 999;
  double y0 = w.grid[j - 1], y1 = w.grid[j], y2 = w.grid[j + 1], y3 = w.grid[j + 2];
  auto Lb = [](double x, double a, double b, double c, double d) { return (x - b) * (x - c) * (x - d) / ((a - b) * (a - c) * (a - d)); };
  double v = w.P[j - 1] * Lb(0, y0, y1, y2, y3) + w.P[j] * Lb(0, y1, y0, y2, y3) + w.P[j + 1] * Lb(0, y2, y0, y1, y3) +
             w.P[j + 2] * Lb(0, y3, y0, y1, y2);
  EXPECT_NEAR(v, 0.5 * (e.P_plus + e.P_minus), 1e-12);
}

TEST(SolveProfile, Errors) {
  auto p = cases::reference_family(0.2);
  auto e = lax_end_states(p);
  EXPECT_THROW(solve_profile(p, e, 200, 4001, 0.0), DomainError);
  EXPECT_THROW(solve_profile(p, e, 200, 8, 1e-10), DomainError);
  ProfileOptions o;
  o.max_iter = 1;
  EXPECT_THROW(solve_profile(p, e, 200, 4001, 1e-14, o), SolverError);
  try {
    solve_profile(p, e, 200, 4001, 1e-14, o);
  } catch (const SolverError& err) {
    EXPECT_GT(err.last_residual, 0.0);
  }
  // a grid far too coarse for the viscous layer drives Newton into vacuum
  auto v = cases::viscous_family(0.2);
  EXPECT_THROW(solve_profile(v, lax_end_states(v), 2000, 401, 1e-10), DomainError);
}

TEST(DecayRates, ViscousFamilyScalesLinearly) {
  std::vector<double> rm, rp;
  for (double eps : {0.1, 0.2}) {
    auto p = cases::viscous_family(eps);
    auto e = lax_end_states(p);
    auto w = solve_profile(p, e, 200, 4001, 1e-12);
    auto d = decay_rates(w, p, e);
    EXPECT_GT(d.minus.rate, 0.0);
    EXPECT_GT(d.plus.rate, 0.0);
    EXPECT_NEAR(d.minus.rate / d.predicted_rate, 1.0, 0.3);
    rm.push_back(d.minus.rate);
    rp.push_back(d.plus.rate);
  }
  EXPECT_NEAR(rm[0] / rm[1], 0.5, 0.1);
  EXPECT_NEAR(rp[0] / rp[1], 0.5, 0.1);
}

TEST(DecayRates, ReferenceShockPositive) {
  auto p = cases::reference_family(0.2);
  auto e = lax_end_states(p);
  auto w = solve_profile(p, e, 200, 4001, 1e-12);
  auto d = decay_rates(w, p, e);
  EXPECT_GT(d.theta_minus, 0.0);
  EXPECT_GT(d.theta_plus, 0.0);
}
