#include <gtest/gtest.h>

#include "cases.hpp"
#include "oracles.hpp"
#include "qhd/essential_spectrum.hpp"

using namespace qhd;

TEST(Dispersion, CoefficientsAtEndStates) {
  auto p = cases::reference_family(0.2);
  auto e = lax_end_states(p);
  for (Side s : {Side::plus, Side::minus}) {
    auto dc = dispersion_coefficients(e, p, s);
    double P = s == Side::plus ? e.P_plus : e.P_minus;
    double J = s == Side::plus ? e.J_plus : e.J_minus;
    double u = J / P, c = sound_speed(P, p.gamma);
    EXPECT_NEAR(dc.alpha, u * u - c * c, 1e-15);
    EXPECT_NEAR(dc.beta + 2 * J / P - p.s, 0.0, 1e-15);
    // subsonic end state <=> alpha < 0
    EXPECT_EQ(dc.alpha < 0, std::abs(u) < c);
  }
  auto dm = dispersion_coefficients(e, p, Side::minus);
  EXPECT_LT(dm.alpha, 0.0);
}

TEST(Dispersion, SmallAmplitudeAlphaLimit) {
  for (double s : {0.3, 0.6}) {
    ShockParams p{1.5, 0.1, 0.5, 0.719, 1e-8, s};
    auto e = lax_end_states(p);
    double c = sound_speed(0.719, 1.5);
    for (Side side : {Side::plus, Side::minus})
      EXPECT_NEAR(dispersion_coefficients(e, p, side).alpha, s * s - 2 * s * c, 1e-6);
  }
}

TEST(Quadratic, StableFormulaMatchesTextbookAndIdentities) {
  std::vector<std::pair<cplx, cplx>> cases_ = {{{1, 2}, {3, -1}}, {{1e6, 0}, {1, 0}}, {{0, 1e-3}, {1e-12, 2e-12}},
                                              {{-2, 0.5}, {0, 0}}, {{0, 0}, {-4, 0}}};
  for (auto [b, c] : cases_) {
    auto [r1, r2] = quadratic_roots(b, c);
    double sc = std::abs(b) + std::sqrt(std::abs(c)) + 1e-300;
    EXPECT_LE(std::abs((r1 + r2) + b), 1e-12 * sc);
    EXPECT_LE(std::abs(r1 * r2 - c), 1e-12 * (std::abs(c) + 1e-300) + 1e-300);
    if (std::abs(b) < 1e3) {
      auto [t1, t2] = oracle::quad_textbook(b, c);
      double d = std::min(std::abs(r1 - t1) + std::abs(r2 - t2), std::abs(r1 - t2) + std::abs(r2 - t1));
      EXPECT_LE(d, 1e-10 * sc);
    }
  }
  // cancellation case: the small root keeps full relative accuracy
  auto [big, small] = quadratic_roots(cplx(1e8), cplx(1.0));
  EXPECT_NEAR(small.real(), -1e-8, 1e-22);
  EXPECT_NEAR(big.real(), -1e8, 1e-6);
}

TEST(XiGrid, SymmetricWithZero) {
  auto g = xi_grid(20.0, 4001);
  ASSERT_EQ(g.size(), 4001u);
  EXPECT_EQ(g[2000], 0.0);
  for (size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g[i], -g[g.size() - 1 - i]);
  for (size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
  EXPECT_EQ(g.back(), 20.0);
  EXPECT_EQ(xi_grid(1.0, 10).size(), 11u);
  EXPECT_THROW(xi_grid(0.0, 11), DomainError);
  EXPECT_THROW(xi_grid(1.0, 2), DomainError);
}

class ReferenceBorders : public ::testing::Test {
 protected:
  ShockParams p = cases::reference_family(0.2);
  EndStates e = lax_end_states(p);
  BorderPair b = fredholm_borders(e, p, 20.0, 4001);
};

TEST_F(ReferenceBorders, RootsSolveTheDispersionRelation) {
  for (const SpectrumCurve* c : {&b.plus, &b.minus}) {
    for (size_t i = 0; i < c->xi_grid.size(); ++i) {
      auto [bq, cq] = dispersion_quadratic(c->xi_grid[i], c->coeffs, p);
      for (cplx l : {c->lambda_plus[i], c->lambda_minus[i]})
        EXPECT_LE(std::abs(l * l + bq * l + cq), 1e-12 * (1 + std::norm(l)));
      cplx sum = c->lambda_plus[i] + c->lambda_minus[i], prod = c->lambda_plus[i] * c->lambda_minus[i];
      EXPECT_LE(std::abs(sum + bq), 1e-12 * std::max(std::abs(bq), 1e-300) + 1e-300);
      EXPECT_LE(std::abs(prod - cq), 1e-12 * std::max(std::abs(cq), 1e-300) + 1e-300);
    }
  }
}

TEST_F(ReferenceBorders, ZeroAtOriginAndStable) {
  size_t i0 = b.plus.xi_grid.size() / 2;
  EXPECT_EQ(b.plus.lambda_plus[i0], cplx(0.0));
  EXPECT_EQ(b.plus.lambda_minus[i0], cplx(0.0));
  EXPECT_EQ(b.minus.lambda_plus[i0], cplx(0.0));
  EXPECT_EQ(b.minus.lambda_minus[i0], cplx(0.0));
  EXPECT_LE(b.plus.max_re, 0.0);
  EXPECT_LE(b.minus.max_re, 0.0);
  auto v = essential_stability_verdict(b);
  EXPECT_TRUE(v.pass);
  EXPECT_TRUE(v.zero_only_at_origin);
  EXPECT_NEAR(v.tangency_order, 2.0, 0.1);
  // no spectral gap: the supremum near the origin tends to zero
  for (size_t i = 1; i < v.gap_profile.size(); ++i)
    EXPECT_GE(v.gap_profile[i].second, v.gap_profile[i - 1].second);
  EXPECT_GT(v.gap_profile.back().second, -1e-6);
}

TEST_F(ReferenceBorders, ConjugateSymmetry) {
  for (const SpectrumCurve* c : {&b.plus, &b.minus}) {
    size_t n = c->xi_grid.size();
    for (size_t i = 0; i < n; ++i) {
      size_t k = n - 1 - i;
      cplx a1 = std::conj(c->lambda_plus[i]), a2 = std::conj(c->lambda_minus[i]);
      cplx m1 = c->lambda_plus[k], m2 = c->lambda_minus[k];
      double d = std::min(std::abs(a1 - m1) + std::abs(a2 - m2), std::abs(a1 - m2) + std::abs(a2 - m1));
      EXPECT_LE(d, 1e-12 * (1 + std::abs(m1) + std::abs(m2)));
    }
  }
}

TEST_F(ReferenceBorders, CurvesAreContinuous) {
  for (const SpectrumCurve* c : {&b.plus, &b.minus})
    for (const auto* branch : {&c->lambda_plus, &c->lambda_minus}) {
      const auto& l = *branch;
      for (size_t i = 2; i + 1 < l.size(); ++i) {
        // jump bounded by 10x the local secant estimate from the neighbouring interval
        double jump = std::abs(l[i] - l[i - 1]);
        double dx = c->xi_grid[i] - c->xi_grid[i - 1], dxp = c->xi_grid[i - 1] - c->xi_grid[i - 2];
        double secant = std::abs(l[i - 1] - l[i - 2]) / dxp * dx;
        EXPECT_LE(jump, 10 * secant + 1e-12) << i;
      }
    }
}

TEST(Borders, SupersonicEndStateFails) {
  auto p = cases::reference_family(0.2);
  DispersionCoefficients dc{0.3, 0.2};  // alpha > 0
  auto c = fredholm_border(dc, p, Side::plus, 20.0, 2001);
  BorderPair b{c, c};
  auto v = essential_stability_verdict(b);
  EXPECT_FALSE(v.pass);
  EXPECT_GT(v.max_re, 0.0);
  EXPECT_LT(std::abs(v.xi_at_max), 5.0);
}
