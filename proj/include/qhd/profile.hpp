#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qhd/banded.hpp"
#include "qhd/errors.hpp"
#include "qhd/fit.hpp"
#include "qhd/shock_data.hpp"
#include "qhd/stencil.hpp"

namespace qhd {

struct WaveProfile {
  std::vector<double> grid, P, dP, d2P, J;
  double L = 0, h = 0;
  double residual_inf = 0;  // ODE defect measured with stencils four orders above the solver's
  double bc_mismatch = 0;
  double newton_residual = 0;
  int newton_iterations = 0;
  int order = 0;
  bool left_projection = false;
  std::string id;
};

struct ReducedProfile {
  double c = 0;
  std::vector<double> z_grid, R;
};

inline double reduced_coefficient(const ShockParams& p) {
  return p.gamma * (p.gamma + 1.0) * std::pow(p.P_minus, p.gamma - 2.0) / (2.0 * p.s * p.mu);
}

inline double reduced_tanh(double c, double z) {
  if (!(c > 0.0)) throw DomainError("reduced_tanh: c must be positive");
  return -0.5 * std::tanh(0.5 * c * z);
}

inline ReducedProfile reduced_profile(double c, std::vector<double> z_grid) {
  ReducedProfile r{c, std::move(z_grid), {}};
  r.R.reserve(r.z_grid.size());
  for (double z : r.z_grid) r.R.push_back(reduced_tanh(c, z));
  return r;
}

// Symmetric uniform grid on [-L, L]; grid[n-1-j] == -grid[j] exactly.
inline std::vector<double> uniform_grid(double L, int n) {
  std::vector<double> y(n);
  for (int j = 0; j < n; ++j) {
    int m = std::min(j, n - 1 - j);
    double v = -L + 2.0 * L * static_cast<double>(m) / static_cast<double>(n - 1);
    if (2 * m == n - 1) v = 0.0;
    y[j] = (j == m) ? v : -v;
  }
  return y;
}

inline std::string profile_id(const ShockParams& p, double L, int n) {
  std::ostringstream os;
  os.precision(17);
  os << "eps=" << p.epsilon << ";L=" << L << ";n=" << n;
  return os.str();
}

// Pointwise defect of P'' = (2/k^2) f(P) - (2 s mu/k^2) P' + P'^2/P.
inline double ode_defect(double P, double dP, double d2P, const ShockParams& p, const EndStates& e) {
  double k2 = p.k * p.k;
  return d2P - 2.0 / k2 * f_of_P(P, e) + 2.0 * p.s * p.mu / k2 * dP - dP * dP / P;
}

inline WaveProfile initial_guess(const ShockParams& p, const EndStates& e, double L, int n_points) {
  if (!(L > 0.0)) throw DomainError("initial_guess: L must be positive");
  if (n_points < 3) throw DomainError("initial_guess: need at least 3 points");
  double c = reduced_coefficient(p), eps = p.epsilon, mid = 0.5 * (e.P_plus + e.P_minus);
  WaveProfile w;
  w.L = L;
  w.grid = uniform_grid(L, n_points);
  w.h = 2.0 * L / (n_points - 1);
  for (double y : w.grid) {
    double R = reduced_tanh(c, eps * y);
    double Rz = c * (R * R - 0.25);
    double Rzz = 2.0 * c * R * Rz;
    double P = eps * R + mid;
    w.P.push_back(P);
    w.dP.push_back(eps * eps * Rz);
    w.d2P.push_back(eps * eps * eps * Rzz);
    w.J.push_back(p.s * P - e.A);
  }
  for (int j = 0; j < n_points; ++j)
    w.residual_inf = std::max(w.residual_inf, std::abs(ode_defect(w.P[j], w.dP[j], w.d2P[j], p, e)));
  w.bc_mismatch = std::max(std::abs(w.P.front() - e.P_minus), std::abs(w.P.back() - e.P_plus));
  w.id = profile_id(p, L, n_points) + ";guess";
  return w;
}

enum class LeftBoundary { automatic, projection, dirichlet };

struct ProfileOptions {
  int order = 10;       // collocation order (even)
  int max_iter = 60;
  LeftBoundary left = LeftBoundary::automatic;
};

// Growth rate of the unstable direction at the saddle P-.
inline double saddle_unstable_rate(const ShockParams& p, const EndStates& e) {
  double a = 2.0 * p.s * p.mu / (p.k * p.k);
  double b = 2.0 / (p.k * p.k) * df_of_P(e.P_minus, e);
  return 0.5 * (-a + std::sqrt(a * a + 4.0 * b));
}

namespace detail {

struct ProfileSystem {
  const ShockParams& p;
  const EndStates& e;
  const DiffOperator& D1;
  const DiffOperator& D2;
  int n, c;                        // c: row holding the phase condition
  std::vector<int> phase_nodes;
  std::vector<double> phase_w;
  bool projection;
  double r_u;
  double k2, a;

  int node_of_row(int r) const { return r < c ? r : r - 1; }

  std::vector<double> residual(const std::vector<double>& P) const {
    std::vector<double> F(n);
    double mid = 0.5 * (e.P_plus + e.P_minus);
    for (int r = 0; r < n; ++r) {
      if (r == 0) {
        F[r] = projection ? D1.apply_at(P, 0) - r_u * (P[0] - e.P_minus) : P[0] - e.P_minus;
      } else if (r == c) {
        double v = 0;
        for (size_t i = 0; i < phase_nodes.size(); ++i) v += phase_w[i] * P[phase_nodes[i]];
        F[r] = v - mid;
      } else {
        int j = node_of_row(r);
        F[r] = ode_defect(P[j], D1.apply_at(P, j), D2.apply_at(P, j), p, e);
      }
    }
    return F;
  }

  void jacobian(const std::vector<double>& P, BandMatrix& Jm) const {
    Jm.clear();
    for (int r = 0; r < n; ++r) {
      if (r == 0) {
        if (projection) {
          const auto& row = D1.row(0);
          for (size_t i = 0; i < row.w.size(); ++i) Jm.at(0, row.first + int(i)) += row.w[i];
          Jm.at(0, 0) -= r_u;
        } else {
          Jm.at(0, 0) = 1.0;
        }
      } else if (r == c) {
        for (size_t i = 0; i < phase_nodes.size(); ++i) Jm.at(r, phase_nodes[i]) += phase_w[i];
      } else {
        int j = node_of_row(r);
        double Pj = P[j], dPj = D1.apply_at(P, j);
        const auto& r1 = D1.row(j);
        const auto& r2 = D2.row(j);
        for (size_t i = 0; i < r2.w.size(); ++i) Jm.at(r, r2.first + int(i)) += r2.w[i];
        double coef1 = a - 2.0 * dPj / Pj;
        for (size_t i = 0; i < r1.w.size(); ++i) Jm.at(r, r1.first + int(i)) += coef1 * r1.w[i];
        Jm.at(r, j) += -2.0 / k2 * df_of_P(Pj, e) + dPj * dPj / (Pj * Pj);
      }
    }
  }
};

inline double inf_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

// Sup-norm ODE defect on the interior nodes, with derivatives from stencils of the given order.
inline double measure_residual(const std::vector<double>& P, double h, int order, const ShockParams& p, const EndStates& e) {
  int n = static_cast<int>(P.size());
  DiffOperator D1(n, h, 1, order), D2(n, h, 2, order);
  double r = 0;
  for (int j = 1; j < n - 1; ++j)
    r = std::max(r, std::abs(ode_defect(P[j], D1.apply_at(P, j), D2.apply_at(P, j), p, e)));
  return r;
}

// Newton collocation for the heteroclinic profile.  tol bounds the sup norm of the
// discrete residual; residual_inf in the result is the independent truncation measure.
inline WaveProfile solve_profile(const ShockParams& p, const EndStates& e, double L, int n_points, double tol,
                                 const ProfileOptions& opt = {}) {
  validate(p);
  if (!(tol > 0.0)) throw DomainError("solve_profile: tol must be positive");
  if (opt.order < 2 || opt.order % 2) throw DomainError("solve_profile: order must be even and >= 2");
  if (n_points < opt.order + 6) throw DomainError("solve_profile: n_points too small for the collocation order");

  WaveProfile w = initial_guess(p, e, L, n_points);
  const int n = n_points;
  const double h = w.h;
  DiffOperator D1(n, h, 1, opt.order), D2(n, h, 2, opt.order);

  detail::ProfileSystem sys{p, e, D1, D2, n, 0, {}, {}, false, 0.0, p.k * p.k, 2.0 * p.s * p.mu / (p.k * p.k)};
  sys.r_u = saddle_unstable_rate(p, e);
  sys.projection = opt.left == LeftBoundary::projection ||
                   (opt.left == LeftBoundary::automatic && p.epsilon * L < 30.0);
  int j0 = 0;
  while (j0 + 1 < n && w.grid[j0 + 1] <= 0.0) ++j0;
  if (w.grid[j0] == 0.0) {
    sys.phase_nodes = {j0};
    sys.phase_w = {1.0};
  } else {
    std::vector<double> x;
    for (int i = j0 - 1; i <= j0 + 2; ++i) {
      sys.phase_nodes.push_back(i);
      x.push_back(w.grid[i]);
    }
    sys.phase_w = interpolation_weights(0.0, x);
  }
  sys.c = j0;

  const int band = opt.order + 3;
  BandMatrix Jm(n, band, band);
  std::vector<double> P = w.P;
  std::vector<double> F = sys.residual(P);
  double res = detail::inf_norm(F);
  const double vacuum = 0.1 * e.P_plus;
  int it = 0;
  bool converged = res <= tol;
  while (!converged) {
    if (it >= opt.max_iter)
      throw SolverError("solve_profile: Newton did not converge in " + std::to_string(opt.max_iter) + " iterations", res);
    sys.jacobian(P, Jm);
    std::vector<double> delta(F.size());
    for (size_t i = 0; i < F.size(); ++i) delta[i] = -F[i];
    Jm.solve(delta);
    ++it;

    double lambda = 1.0, best_res = std::numeric_limits<double>::infinity();
    std::vector<double> best;
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries, lambda *= 0.5) {
      std::vector<double> trial(P);
      for (int i = 0; i < n; ++i) trial[i] += lambda * delta[i];
      if (*std::min_element(trial.begin(), trial.end()) <= vacuum) continue;
      double r = detail::inf_norm(sys.residual(trial));
      if (r < best_res) {
        best_res = r;
        best = std::move(trial);
      }
      accepted = r < (1.0 - 1e-4 * lambda) * res;
    }
    if (best.empty()) throw DomainError("solve_profile: Newton iterate reached vacuum (P <= P+/10)");
    double step = lambda * 2.0 * detail::inf_norm(delta);
    P = std::move(best);
    F = sys.residual(P);
    res = detail::inf_norm(F);
    converged = res <= tol || step <= 1e-14 * e.P_minus;
  }

  w.P = P;
  w.dP = D1.apply(P);
  w.d2P = D2.apply(P);
  for (int j = 0; j < n; ++j) w.J[j] = p.s * P[j] - e.A;
  w.newton_residual = res;
  w.newton_iterations = it;
  w.order = opt.order;
  w.left_projection = sys.projection;
  w.residual_inf = measure_residual(P, h, opt.order + 4, p, e);
  w.bc_mismatch = std::max(std::abs(P.front() - e.P_minus), std::abs(P.back() - e.P_plus));
  w.id = profile_id(p, L, n);
  return w;
}

struct ProfileShape {
  double max_dP = 0;        // > 0 means the profile is not monotone
  double max_abs_dP = 0;
  double max_abs_d2P = 0;
  double overshoot = 0;     // largest excursion outside [P+, P-]
  double J_consistency = 0; // sup |J - (sP - A)|
  int argmax_dP = 0;
};

inline ProfileShape profile_shape(const WaveProfile& w, const ShockParams& p, const EndStates& e) {
  ProfileShape s;
  s.max_dP = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < w.P.size(); ++j) {
    if (w.dP[j] > s.max_dP) {
      s.max_dP = w.dP[j];
      s.argmax_dP = int(j);
    }
    s.max_abs_dP = std::max(s.max_abs_dP, std::abs(w.dP[j]));
    s.max_abs_d2P = std::max(s.max_abs_d2P, std::abs(w.d2P[j]));
    s.overshoot = std::max({s.overshoot, e.P_plus - w.P[j], w.P[j] - e.P_minus});
    s.J_consistency = std::max(s.J_consistency, std::abs(w.J[j] - (p.s * w.P[j] - e.A)));
  }
  return s;
}

struct TailFit {
  double rate = 0;   // fitted exponent: |P - P_end| ~ exp(-rate |y|)
  double y_from = 0, y_to = 0;
  int points = 0;
  bool truncated = false;
};

struct DecayReport {
  TailFit minus, plus;
  double theta_minus = 0, theta_plus = 0;  // rate / epsilon
  double predicted_rate = 0;               // c * epsilon from the tanh tail
  std::vector<std::string> warnings;
};

namespace detail {

// tail_idx ordered from the outer boundary inwards
inline TailFit fit_tail(const WaveProfile& w, const std::vector<int>& tail_idx, double end_value, double floor) {
  TailFit t;
  // usable part: from the innermost point down to the first point (scanning outwards) below the floor
  std::vector<int> usable;
  for (auto it = tail_idx.rbegin(); it != tail_idx.rend(); ++it) {
    if (std::abs(w.P[*it] - end_value) <= floor) break;
    usable.push_back(*it);
  }
  std::reverse(usable.begin(), usable.end());  // outer first again
  t.truncated = usable.size() < tail_idx.size();
  size_t m = std::max<size_t>(usable.size() / 4, std::min<size_t>(usable.size(), 5));
  std::vector<double> x, yv;
  for (size_t i = 0; i < m; ++i) {
    int j = usable[i];
    double d = std::abs(w.P[j] - end_value);
    if (d <= floor) continue;
    x.push_back(std::abs(w.grid[j]));
    yv.push_back(std::log(d));
  }
  t.points = int(x.size());
  if (t.points >= 2) {
    t.rate = -linear_fit(x, yv).slope;
    t.y_from = x.front();
    t.y_to = x.back();
  }
  return t;
}

}  // namespace detail

inline DecayReport decay_rates(const WaveProfile& w, const ShockParams& p, const EndStates& e) {
  DecayReport r;
  int n = int(w.P.size());
  std::vector<int> left, right;
  for (int j = 0; j < n; ++j) {
    if (w.grid[j] < 0) left.push_back(j);
    if (w.grid[j] > 0) right.push_back(j);
  }
  std::reverse(right.begin(), right.end());
  double floor = 1e3 * std::numeric_limits<double>::epsilon() * e.P_minus;
  r.minus = detail::fit_tail(w, left, e.P_minus, floor);
  r.plus = detail::fit_tail(w, right, e.P_plus, floor);
  r.theta_minus = r.minus.rate / p.epsilon;
  r.theta_plus = r.plus.rate / p.epsilon;
  r.predicted_rate = reduced_coefficient(p) * p.epsilon;
  auto note = [&](const TailFit& t, const char* side) {
    if (t.truncated)
      r.warnings.push_back(std::string(side) + " tail reaches the floating-point floor; fit window truncated");
    if (t.points < 2) r.warnings.push_back(std::string(side) + " tail has too few points above the floor to fit");
  };
  note(r.minus, "left");
  note(r.plus, "right");
  return r;
}

}  // namespace qhd
