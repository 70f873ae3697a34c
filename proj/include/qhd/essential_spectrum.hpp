#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "qhd/errors.hpp"
#include "qhd/fit.hpp"
#include "qhd/shock_data.hpp"

namespace qhd {

using cplx = std::complex<double>;

enum class Side { plus, minus };

inline const char* side_name(Side s) { return s == Side::plus ? "plus" : "minus"; }

struct DispersionCoefficients {
  double alpha = 0, beta = 0;
};

inline DispersionCoefficients dispersion_coefficients(const EndStates& e, const ShockParams& p, Side side) {
  double P = side == Side::plus ? e.P_plus : e.P_minus;
  double J = side == Side::plus ? e.J_plus : e.J_minus;
  double u = J / P;
  return {u * u - p.gamma * std::pow(P, p.gamma - 1.0), p.s - 2.0 * u};
}

// Roots of x^2 + b x + c = 0.  The larger root comes from the cancellation-free
// branch and the smaller one from the product.
inline std::pair<cplx, cplx> quadratic_roots(cplx b, cplx c) {
  cplx d = std::sqrt(b * b - 4.0 * c);
  if (std::real(std::conj(b) * d) < 0.0) d = -d;
  cplx q = -0.5 * (b + d);
  if (q == cplx(0.0)) return {cplx(0.0), cplx(0.0)};
  return {q, c / q};
}

// Coefficients of the quadratic in lambda at frequency xi.
inline std::pair<cplx, cplx> dispersion_quadratic(double xi, const DispersionCoefficients& dc, const ShockParams& p) {
  const cplx I(0.0, 1.0);
  cplx b = xi * (p.mu * xi - I * (p.s + dc.beta));
  cplx c = xi * xi * (0.5 * p.k * p.k * xi * xi - dc.alpha - p.s * (dc.beta + I * p.mu * xi));
  return {b, c};
}

struct SpectrumCurve {
  std::vector<double> xi_grid;
  std::vector<cplx> lambda_plus, lambda_minus;
  Side end_state_tag = Side::plus;
  DispersionCoefficients coeffs;
  double max_re = -std::numeric_limits<double>::infinity();
  double xi_at_max_re = 0;
};

// Symmetric grid containing 0: linear up to xi_max/100, logarithmic beyond.
// An even n_xi is rounded up so that 0 is a node.
inline std::vector<double> xi_grid(double xi_max, int n_xi) {
  if (!(xi_max > 0.0)) throw DomainError("xi_grid: xi_max must be positive");
  if (n_xi < 3) throw DomainError("xi_grid: n_xi must be >= 3");
  int half = n_xi / 2;
  double xi_lin = xi_max / 100.0;
  int n_lin = std::max(1, half / 2);
  int n_log = half - n_lin;
  std::vector<double> pos;
  if (n_log == 0) {
    for (int i = 1; i <= half; ++i) pos.push_back(xi_max * i / half);
  } else {
    for (int i = 1; i <= n_lin; ++i) pos.push_back(xi_lin * i / n_lin);
    double r = std::log(xi_max / xi_lin);
    for (int i = 1; i <= n_log; ++i) pos.push_back(i == n_log ? xi_max : xi_lin * std::exp(r * i / n_log));
  }
  std::vector<double> g;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) g.push_back(-*it);
  g.push_back(0.0);
  g.insert(g.end(), pos.begin(), pos.end());
  return g;
}

namespace detail {

// Roots of the quadratic divided by xi^2 in nu = lambda / xi; finite at xi = 0.
inline std::pair<cplx, cplx> scaled_roots(double xi, const DispersionCoefficients& dc, const ShockParams& p) {
  const cplx I(0.0, 1.0);
  cplx b = p.mu * xi - I * (p.s + dc.beta);
  cplx c = 0.5 * p.k * p.k * xi * xi - dc.alpha - p.s * (dc.beta + I * p.mu * xi);
  return quadratic_roots(b, c);
}

// Walk outward from index i0, assigning roots to branches by proximity.
inline void track(const std::vector<double>& xi, int i0, int step, std::vector<cplx>& a, std::vector<cplx>& b,
                  const DispersionCoefficients& dc, const ShockParams& p) {
  int n = int(xi.size());
  for (int i = i0 + step; i >= 0 && i < n; i += step) {
    auto [r1, r2] = scaled_roots(xi[i], dc, p);
    cplx pa = a[i - step], pb = b[i - step];
    if (std::abs(r1 - pa) + std::abs(r2 - pb) <= std::abs(r2 - pa) + std::abs(r1 - pb)) {
      a[i] = r1;
      b[i] = r2;
    } else {
      a[i] = r2;
      b[i] = r1;
    }
  }
}

}  // namespace detail

inline SpectrumCurve fredholm_border(const DispersionCoefficients& dc, const ShockParams& p, Side side, double xi_max,
                                     int n_xi) {
  SpectrumCurve c;
  c.end_state_tag = side;
  c.coeffs = dc;
  c.xi_grid = xi_grid(xi_max, n_xi);
  int n = int(c.xi_grid.size()), i0 = n / 2;
  std::vector<cplx> a(n), b(n);
  auto [r1, r2] = detail::scaled_roots(0.0, c.coeffs, p);
  // branch "plus" starts on the root with the larger imaginary part
  if (r1.imag() >= r2.imag()) {
    a[i0] = r1;
    b[i0] = r2;
  } else {
    a[i0] = r2;
    b[i0] = r1;
  }
  detail::track(c.xi_grid, i0, +1, a, b, c.coeffs, p);
  detail::track(c.xi_grid, i0, -1, a, b, c.coeffs, p);
  c.lambda_plus.resize(n);
  c.lambda_minus.resize(n);
  for (int i = 0; i < n; ++i) {
    c.lambda_plus[i] = c.xi_grid[i] * a[i];
    c.lambda_minus[i] = c.xi_grid[i] * b[i];
    if (i == i0) continue;
    for (cplx l : {c.lambda_plus[i], c.lambda_minus[i]})
      if (l.real() > c.max_re) {
        c.max_re = l.real();
        c.xi_at_max_re = c.xi_grid[i];
      }
  }
  return c;
}

struct BorderPair {
  SpectrumCurve plus, minus;  // at the end states P+ and P-
};

inline SpectrumCurve fredholm_border(const EndStates& e, const ShockParams& p, Side side, double xi_max, int n_xi) {
  return fredholm_border(dispersion_coefficients(e, p, side), p, side, xi_max, n_xi);
}

inline BorderPair fredholm_borders(const EndStates& e, const ShockParams& p, double xi_max = 20.0, int n_xi = 4001) {
  return {fredholm_border(e, p, Side::plus, xi_max, n_xi), fredholm_border(e, p, Side::minus, xi_max, n_xi)};
}

struct EssentialVerdict {
  bool pass = false;
  double tol = 1e-10;
  double max_re = 0;        // over xi != 0, both end states
  double xi_at_max = 0;
  Side side_at_max = Side::plus;
  bool zero_only_at_origin = false;  // no sampled xi != 0 with Re lambda >= 0
  double tangency_order = 0;        // fitted p in |Re lambda| ~ C |xi|^p near xi = 0
  double tangency_coefficient = 0;
  std::vector<std::pair<double, double>> gap_profile;  // (delta, sup Re lambda over 0 < |xi| <= delta)
};

// Largest real part over the two branches at each xi.
inline std::vector<double> real_envelope(const SpectrumCurve& c) {
  std::vector<double> r(c.xi_grid.size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = std::max(c.lambda_plus[i].real(), c.lambda_minus[i].real());
  return r;
}

inline EssentialVerdict essential_stability_verdict(const BorderPair& b, double tol = 1e-10) {
  EssentialVerdict v;
  v.tol = tol;
  v.max_re = -std::numeric_limits<double>::infinity();
  v.zero_only_at_origin = true;
  for (const SpectrumCurve* c : {&b.plus, &b.minus}) {
    if (c->max_re > v.max_re) {
      v.max_re = c->max_re;
      v.xi_at_max = c->xi_at_max_re;
      v.side_at_max = c->end_state_tag;
    }
    for (size_t i = 0; i < c->xi_grid.size(); ++i) {
      if (c->xi_grid[i] == 0.0) continue;
      if (c->lambda_plus[i].real() >= 0.0 || c->lambda_minus[i].real() >= 0.0) v.zero_only_at_origin = false;
    }
  }
  v.pass = v.max_re < tol && v.zero_only_at_origin;

  // tangency: fit the envelope of both sides on the smallest positive frequencies
  auto ep = real_envelope(b.plus), em = real_envelope(b.minus);
  const auto& xi = b.plus.xi_grid;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < xi.size() && lx.size() < 20; ++i) {
    if (xi[i] <= 0.0) continue;
    double r = std::max(ep[i], em[i]);
    if (r < 0.0) {
      lx.push_back(std::log(xi[i]));
      ly.push_back(std::log(-r));
    }
  }
  if (lx.size() >= 2) {
    auto f = linear_fit(lx, ly);
    v.tangency_order = f.slope;
    v.tangency_coefficient = std::exp(f.intercept);
  }
  double xmax = 0;
  for (double x : xi) xmax = std::max(xmax, std::abs(x));
  for (double delta = xmax; delta >= xmax * 1e-5; delta /= 10.0) {
    double sup = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < xi.size(); ++i)
      if (xi[i] != 0.0 && std::abs(xi[i]) <= delta) sup = std::max({sup, ep[i], em[i]});
    v.gap_profile.emplace_back(delta, sup);
  }
  return v;
}

}  // namespace qhd
