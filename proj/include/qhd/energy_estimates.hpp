#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qhd/errors.hpp"
#include "qhd/profile.hpp"
#include "qhd/shock_data.hpp"
#include "qhd/stencil.hpp"

namespace qhd {

struct CoefficientFields {
  std::vector<double> f1, f2;          // written through A
  std::vector<double> f1_alt, f2_alt;  // written through J = sP - A
};

inline CoefficientFields evaluate_f1_f2(const WaveProfile& w, const EndStates& e, const ShockParams& p) {
  CoefficientFields c;
  size_t n = w.P.size();
  c.f1.resize(n);
  c.f2.resize(n);
  c.f1_alt.resize(n);
  c.f2_alt.resize(n);
  for (size_t j = 0; j < n; ++j) {
    double P = w.P[j], pg = p.gamma * std::pow(P, p.gamma - 1.0);
    double v = p.s - e.A / P;
    c.f1[j] = v * v - pg;
    c.f2[j] = -p.s + 2.0 * e.A / P;
    double u = w.J[j] / P;
    c.f1_alt[j] = u * u - pg;
    c.f2_alt[j] = p.s - 2.0 * u;
  }
  return c;
}

namespace detail {
inline DiffOperator profile_d(const WaveProfile& w, int deriv) {
  return DiffOperator(int(w.P.size()), w.h, deriv, w.order > 0 ? w.order : 4);
}
}  // namespace detail

// g = -1/2 [ f2/f1 - mu (1/f1)' ]' with the profile solver's stencils.
inline std::vector<double> evaluate_g(const WaveProfile& w, const ShockParams& p, const std::vector<double>& f1,
                                      const std::vector<double>& f2) {
  const double floor = 10.0 * std::numeric_limits<double>::epsilon();
  for (size_t j = 0; j < f1.size(); ++j)
    if (std::abs(f1[j]) < floor)
      throw DomainError("evaluate_g: f1 vanishes at y = " + std::to_string(w.grid[j]));
  auto D1 = detail::profile_d(w, 1);
  std::vector<double> inv(f1.size()), q(f1.size());
  for (size_t j = 0; j < f1.size(); ++j) inv[j] = 1.0 / f1[j];
  auto dinv = D1.apply(inv);
  for (size_t j = 0; j < f1.size(); ++j) q[j] = f2[j] / f1[j] - p.mu * dinv[j];
  auto g = D1.apply(q);
  for (auto& v : g) v *= -0.5;
  return g;
}

// Expanded form of g with f1', f1'', f2' from the chain rule on P', P''.
inline std::vector<double> evaluate_g_expanded(const WaveProfile& w, const EndStates& e, const ShockParams& p) {
  std::vector<double> g(w.P.size());
  const double A = e.A, s = p.s, gm = p.gamma;
  for (size_t j = 0; j < g.size(); ++j) {
    double P = w.P[j], P1 = w.dP[j], P2 = w.d2P[j];
    double v = s - A / P;
    double f1 = v * v - gm * std::pow(P, gm - 1.0);
    double f2 = -s + 2.0 * A / P;
    double F1p = 2.0 * v * A / (P * P) - gm * (gm - 1.0) * std::pow(P, gm - 2.0);
    double F1pp = 2.0 * A * A / std::pow(P, 4) - 4.0 * v * A / (P * P * P) -
                  gm * (gm - 1.0) * (gm - 2.0) * std::pow(P, gm - 3.0);
    double F2p = -2.0 * A / (P * P);
    double df1 = F1p * P1, d2f1 = F1pp * P1 * P1 + F1p * P2, df2 = F2p * P1;
    g[j] = -(df2 * f1 * f1 - f1 * df1 * f2 + p.mu * f1 * d2f1 - 2.0 * p.mu * df1 * df1) / (2.0 * f1 * f1 * f1);
  }
  return g;
}

struct EnergyCheck {
  std::string name;
  bool pass = true;
  double margin = std::numeric_limits<double>::infinity();  // worst slack; negative when violated
  int index = -1;
  double y = 0;
};

struct EnergyReport {
  std::vector<double> f1, f2, g, abs_dP;
  std::vector<double> df1, df2, d2f1, d2f2;
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0, C_bar = 0;
  int c3_index = -1, c4_index = -1, C_bar_index = -1;
  std::vector<EnergyCheck> checks;
  double epsilon = 0;
  double tail_floor = 0;   // absolute |P'| threshold
  int floored_points = 0;  // points kept after the floor
  double form_agreement = 0;  // max |f_i - f_i_alt| / max |f_i|
  double g_agreement = 0;     // max |g - g_expanded| / max |g| over kept points
  bool pass = false;
};

namespace detail {
inline void note(EnergyCheck& c, double slack, int j, const WaveProfile& w) {
  if (slack < c.margin) {
    c.margin = slack;
    c.index = j;
    c.y = w.grid[j];
  }
  if (slack <= 0) c.pass = false;
}
}  // namespace detail

// Tail-floored interior points, endpoints excluded.  The floor is the larger of
// rel_floor * max|P'| and 100x the round-off level of f'' from the second-difference
// stencil, measured against eps |P'| (the scale of the f'' bound).
inline std::vector<int> floored_points(const WaveProfile& w, double rel_floor, double epsilon, double f_scale,
                                       double& abs_floor) {
  double mx = 0;
  for (double v : w.dP) mx = std::max(mx, std::abs(v));
  auto D2 = detail::profile_d(w, 2);
  double wsum = 0;
  for (int j = 0; j < D2.size(); ++j) {
    double t = 0;
    for (double v : D2.row(j).w) t += std::abs(v);
    wsum = std::max(wsum, t);
  }
  double noise = 100.0 * std::numeric_limits<double>::epsilon() * f_scale * wsum / epsilon;
  abs_floor = std::max(rel_floor * mx, noise);
  std::vector<int> idx;
  for (int j = 1; j + 1 < int(w.dP.size()); ++j)
    if (std::abs(w.dP[j]) >= abs_floor && w.dP[j] != 0.0) idx.push_back(j);
  return idx;
}

inline void certify_lemma_f(const WaveProfile& w, const ShockParams& p, const std::vector<int>& kept, EnergyReport& r) {
  const int n = int(w.P.size());
  auto D1 = detail::profile_d(w, 1), D2 = detail::profile_d(w, 2);
  r.df1 = D1.apply(r.f1);
  r.df2 = D1.apply(r.f2);
  r.d2f1 = D2.apply(r.f1);
  r.d2f2 = D2.apply(r.f2);

  EnergyCheck f1neg{"f1_negative"}, f2pos{"f2_positive"}, df1{"f1_prime_order"}, df2{"f2_prime_order"},
      d2{"f_second_order"};
  double min_mf1 = std::numeric_limits<double>::infinity(), max_mf1 = 0;
  double min_f2 = std::numeric_limits<double>::infinity(), max_f2 = -min_f2;
  for (int j = 0; j < n; ++j) {
    detail::note(f1neg, -r.f1[j], j, w);
    detail::note(f2pos, r.f2[j], j, w);
    min_mf1 = std::min(min_mf1, -r.f1[j]);
    max_mf1 = std::max(max_mf1, -r.f1[j]);
    min_f2 = std::min(min_f2, r.f2[j]);
    max_f2 = std::max(max_f2, r.f2[j]);
  }
  r.c1 = f1neg.pass ? std::min(min_mf1, 1.0 / max_mf1) : 0.0;
  r.c2 = f2pos.pass ? std::max(max_f2, 1.0 / min_f2) : 0.0;

  // c3: smallest constant with c3^-1 |P'| <= f_i' <= c3 |P'|; requires f_i' > 0
  double c3 = 1.0, c4 = 0.0;
  for (int j : kept) {
    double a = std::abs(w.dP[j]);
    for (auto [df, chk] : {std::pair{r.df1[j], &df1}, std::pair{r.df2[j], &df2}}) {
      double ratio = df / a;
      detail::note(*chk, ratio, j, w);
      if (ratio > 0) {
        double need = std::max(ratio, 1.0 / ratio);
        if (need > c3) {
          c3 = need;
          r.c3_index = j;
        }
      }
    }
    double q = std::max(std::abs(r.d2f1[j]), std::abs(r.d2f2[j])) / (p.epsilon * a);
    if (q > c4) {
      c4 = q;
      r.c4_index = j;
    }
    detail::note(d2, std::isfinite(q) ? 1.0 : -1.0, j, w);
  }
  r.c3 = (df1.pass && df2.pass) ? c3 : std::numeric_limits<double>::infinity();
  r.c4 = c4;
  d2.margin = c4;  // reported value: the constant itself
  r.checks.insert(r.checks.end(), {f1neg, f2pos, df1, df2, d2});
}

inline void certify_corollary_g(const WaveProfile& w, const std::vector<int>& kept, EnergyReport& r) {
  EnergyCheck c{"g_lower_bound"};
  double cbar = std::numeric_limits<double>::infinity();
  for (int j : kept) {
    double q = r.g[j] / std::abs(w.dP[j]);
    detail::note(c, q, j, w);
    if (q < cbar) {
      cbar = q;
      r.C_bar_index = j;
    }
  }
  r.C_bar = kept.empty() ? 0.0 : cbar;
  r.checks.push_back(c);
}

inline EnergyReport energy_report(const WaveProfile& w, const EndStates& e, const ShockParams& p,
                                  double rel_tail_floor = 1e-13) {
  EnergyReport r;
  r.epsilon = p.epsilon;
  auto cf = evaluate_f1_f2(w, e, p);
  r.f1 = cf.f1;
  r.f2 = cf.f2;
  double s1 = 0, s2 = 0, d1 = 0, d2 = 0;
  for (size_t j = 0; j < r.f1.size(); ++j) {
    s1 = std::max(s1, std::abs(r.f1[j]));
    s2 = std::max(s2, std::abs(r.f2[j]));
    d1 = std::max(d1, std::abs(r.f1[j] - cf.f1_alt[j]));
    d2 = std::max(d2, std::abs(r.f2[j] - cf.f2_alt[j]));
  }
  r.form_agreement = std::max(d1 / s1, d2 / s2);
  r.g = evaluate_g(w, p, r.f1, r.f2);
  r.abs_dP.resize(w.dP.size());
  for (size_t j = 0; j < w.dP.size(); ++j) r.abs_dP[j] = std::abs(w.dP[j]);
  auto kept = floored_points(w, rel_tail_floor, p.epsilon, std::max(s1, s2), r.tail_floor);
  r.floored_points = int(kept.size());

  auto gx = evaluate_g_expanded(w, e, p);
  double gmax = 0, gd = 0;
  for (int j : kept) {
    gmax = std::max(gmax, std::abs(gx[j]));
    gd = std::max(gd, std::abs(r.g[j] - gx[j]));
  }
  r.g_agreement = gmax > 0 ? gd / gmax : 0.0;

  certify_lemma_f(w, p, kept, r);
  certify_corollary_g(w, kept, r);
  r.pass = true;
  for (const auto& c : r.checks) r.pass = r.pass && c.pass;
  return r;
}

}  // namespace qhd
