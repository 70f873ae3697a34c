#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qhd/dense_eigen.hpp"
#include "qhd/errors.hpp"
#include "qhd/essential_spectrum.hpp"
#include "qhd/profile.hpp"
#include "qhd/shock_data.hpp"
#include "qhd/stencil.hpp"

namespace qhd {

enum class OperatorKind { integrated, original };

// Boundary treatment of the eigenvalue problem.
//   zero_ghost:        rho = m = 0 at both ends and zero ghost values for the centered stencils
//   dirichlet_one_sided: rho = m = 0 at both ends, rho' = 0 at the left end, one-sided stencils
enum class EigenClosure { zero_ghost, dirichlet_one_sided };

inline const char* closure_name(EigenClosure c) {
  return c == EigenClosure::zero_ghost ? "zero_ghost" : "dirichlet_one_sided";
}

struct DiscreteOperator {
  int n = 0;                      // grid nodes including both boundary nodes
  std::vector<double> grid;
  Eigen::MatrixXd matrix;         // acts on stacked (rho, m) unknowns
  OperatorKind kind = OperatorKind::integrated;
  EigenClosure closure = EigenClosure::zero_ghost;
  std::string profile_ref;
  std::vector<int> rho_nodes, m_nodes;  // grid node of each unknown
  std::vector<double> f1, f2;           // sampled coefficients on the full grid
  std::vector<double> zero_mode;        // original kind: (P', J') on the unknowns
};

struct PointOptions {
  int stencil_order = 8;
  EigenClosure closure = EigenClosure::zero_ghost;
};

namespace detail {

// Maps (field, node) to a combination of unknown columns; boundary values vanish and the
// left-end node of rho may be eliminated through rho'(-L) = 0.
struct ColumnMap {
  int n = 0;
  std::vector<int> rho_col, m_col;                   // -1: no unknown at this node
  std::vector<std::pair<int, double>> rho1_elim;     // rho_1 = sum w * unknown

  void add(Eigen::MatrixXd& M, int row, bool rho_field, int node, double value) const {
    if (node < 0 || node >= n) return;  // ghost
    int c = rho_field ? rho_col[node] : m_col[node];
    if (c >= 0) {
      M(row, c) += value;
    } else if (rho_field && node == 1) {
      for (auto [col, w] : rho1_elim) M(row, col) += value * w;
    }
  }
};

struct Term {
  bool eq_rho;    // equation row: rho-equation or m-equation
  bool var_rho;   // acts on rho or m
  const DiffOperator* D;  // nullptr: multiplication
  const std::vector<double>* coef;
  double scale;
};

inline ColumnMap make_columns(int n, EigenClosure closure, const DiffOperator& D1, std::vector<int>& rho_nodes,
                              std::vector<int>& m_nodes) {
  ColumnMap cm;
  cm.n = n;
  cm.rho_col.assign(n, -1);
  cm.m_col.assign(n, -1);
  int first_rho = closure == EigenClosure::zero_ghost ? 1 : 2;
  int col = 0;
  for (int j = first_rho; j <= n - 2; ++j) {
    cm.rho_col[j] = col++;
    rho_nodes.push_back(j);
  }
  for (int j = 1; j <= n - 2; ++j) {
    cm.m_col[j] = col++;
    m_nodes.push_back(j);
  }
  if (closure == EigenClosure::dirichlet_one_sided) {
    const auto& r = D1.row(0);
    if (r.first != 0) throw DomainError("assemble: unexpected left stencil");
    double w1 = r.w[1];
    for (size_t i = 2; i < r.w.size(); ++i) {
      int node = int(i);
      if (node <= n - 2) cm.rho1_elim.emplace_back(cm.rho_col[node], -r.w[i] / w1);
    }
  }
  return cm;
}

inline Eigen::MatrixXd build(const ColumnMap& cm, const std::vector<Term>& terms, const std::vector<int>& rho_rows,
                             const std::vector<int>& m_rows) {
  int N = int(rho_rows.size() + m_rows.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  auto fill = [&](bool eq_rho, const std::vector<int>& rows, int offset) {
    for (size_t r = 0; r < rows.size(); ++r) {
      int j = rows[r], row = offset + int(r);
      for (const auto& t : terms) {
        if (t.eq_rho != eq_rho) continue;
        double c = t.scale * (t.coef ? (*t.coef)[j] : 1.0);
        if (c == 0.0) continue;
        if (!t.D) {
          cm.add(M, row, t.var_rho, j, c);
          continue;
        }
        const auto& st = t.D->row(j);
        for (size_t i = 0; i < st.w.size(); ++i) cm.add(M, row, t.var_rho, st.first + int(i), c * st.w[i]);
      }
    }
  };
  fill(true, rho_rows, 0);
  fill(false, m_rows, int(rho_rows.size()));
  return M;
}

inline void require_uniform(const WaveProfile& w) {
  if (w.grid.size() < 8) throw DomainError("assemble: profile grid too small");
  double h = w.grid[1] - w.grid[0];
  for (size_t j = 1; j < w.grid.size(); ++j)
    if (std::abs((w.grid[j] - w.grid[j - 1]) - h) > 1e-9 * h)
      throw DomainError("assemble: profile grid is not uniform");
}

}  // namespace detail

inline std::vector<double> sample_f1(const WaveProfile& w, const ShockParams& p, const EndStates& e) {
  std::vector<double> f(w.P.size());
  for (size_t j = 0; j < f.size(); ++j) {
    double u = p.s - e.A / w.P[j];
    f[j] = u * u - p.gamma * std::pow(w.P[j], p.gamma - 1.0);
  }
  return f;
}

inline std::vector<double> sample_f2(const WaveProfile& w, const ShockParams& p, const EndStates& e) {
  std::vector<double> f(w.P.size());
  for (size_t j = 0; j < f.size(); ++j) f[j] = -p.s + 2.0 * e.A / w.P[j];
  return f;
}

inline DiscreteOperator assemble_integrated(const WaveProfile& w, const ShockParams& p, const EndStates& e,
                                            const PointOptions& opt = {}) {
  detail::require_uniform(w);
  const int n = int(w.grid.size());
  const double h = w.grid[1] - w.grid[0];
  Closure cl = opt.closure == EigenClosure::zero_ghost ? Closure::zero_ghost : Closure::one_sided;
  DiffOperator D1(n, h, 1, opt.stencil_order, cl), D2(n, h, 2, opt.stencil_order, cl),
      D3(n, h, 3, opt.stencil_order, cl);
  DiscreteOperator op;
  op.n = n;
  op.grid = w.grid;
  op.kind = OperatorKind::integrated;
  op.closure = opt.closure;
  op.profile_ref = w.id;
  op.f1 = sample_f1(w, p, e);
  op.f2 = sample_f2(w, p, e);
  const double k2 = p.k * p.k;
  std::vector<double> c_rho1(n), c_rho2(n);
  for (int j = 0; j < n; ++j) {
    double q = w.dP[j] / w.P[j];
    c_rho1[j] = op.f1[j] + 0.5 * k2 * q * q;
    c_rho2[j] = -k2 * q;
  }
  auto cm = detail::make_columns(n, opt.closure, D1, op.rho_nodes, op.m_nodes);
  std::vector<detail::Term> terms = {
      {true, true, &D1, nullptr, p.s},          {true, false, &D1, nullptr, -1.0},
      {false, true, &D1, &c_rho1, 1.0},         {false, true, &D2, &c_rho2, 1.0},
      {false, true, &D3, nullptr, 0.5 * k2},    {false, false, &D1, &op.f2, 1.0},
      {false, false, &D2, nullptr, p.mu},
  };
  op.matrix = detail::build(cm, terms, op.rho_nodes, op.m_nodes);
  return op;
}

// Linearization in the original (non-integrated) variables; used for the translation-mode check.
inline DiscreteOperator assemble_original(const WaveProfile& w, const ShockParams& p, const EndStates& e,
                                          const PointOptions& opt = {}) {
  detail::require_uniform(w);
  const int n = int(w.grid.size());
  const double h = w.grid[1] - w.grid[0];
  Closure cl = opt.closure == EigenClosure::zero_ghost ? Closure::zero_ghost : Closure::one_sided;
  DiffOperator D1(n, h, 1, opt.stencil_order, cl), D2(n, h, 2, opt.stencil_order, cl),
      D3(n, h, 3, opt.stencil_order, cl);
  DiscreteOperator op;
  op.n = n;
  op.grid = w.grid;
  op.kind = OperatorKind::original;
  op.closure = opt.closure;
  op.profile_ref = w.id;
  op.f1 = sample_f1(w, p, e);
  op.f2 = sample_f2(w, p, e);
  const double k2 = p.k * p.k, g = p.gamma;
  std::vector<double> c_r0(n), c_r1(n), c_r2(n), c_m0(n);
  for (int j = 0; j < n; ++j) {
    double P = w.P[j], P1 = w.dP[j], P2 = w.d2P[j];
    double u = w.J[j] / P;
    double a1p = 2.0 * u * e.A * P1 / (P * P);
    double a2p = 2.0 * e.A * P1 / (P * P);
    double a3p = (g - 1.0) * std::pow(P, g - 2.0) * P1;
    c_r0[j] = a1p - g * a3p + k2 * (P1 * P2 / (P * P) - P1 * P1 * P1 / (P * P * P));
    c_r1[j] = op.f1[j] - k2 * (P2 / P - 1.5 * P1 * P1 / (P * P));
    c_r2[j] = -k2 * P1 / P;
    c_m0[j] = -a2p;
  }
  auto cm = detail::make_columns(n, opt.closure, D1, op.rho_nodes, op.m_nodes);
  std::vector<detail::Term> terms = {
      {true, true, &D1, nullptr, p.s},        {true, false, &D1, nullptr, -1.0},
      {false, true, nullptr, &c_r0, 1.0},     {false, true, &D1, &c_r1, 1.0},
      {false, true, &D2, &c_r2, 1.0},         {false, true, &D3, nullptr, 0.5 * k2},
      {false, false, nullptr, &c_m0, 1.0},    {false, false, &D1, &op.f2, 1.0},
      {false, false, &D2, nullptr, p.mu},
  };
  op.matrix = detail::build(cm, terms, op.rho_nodes, op.m_nodes);
  for (int j : op.rho_nodes) op.zero_mode.push_back(w.dP[j]);
  for (int j : op.m_nodes) op.zero_mode.push_back(p.s * w.dP[j]);
  return op;
}

// ||L v|| / ||v|| for the sampled translation mode v = (P', J').
inline double zero_mode_residual(const DiscreteOperator& op) {
  if (op.kind != OperatorKind::original || op.zero_mode.empty())
    throw DomainError("zero_mode_residual: needs an operator from assemble_original");
  Eigen::Map<const Eigen::VectorXd> v(op.zero_mode.data(), Eigen::Index(op.zero_mode.size()));
  return (op.matrix * v).norm() / v.norm();
}

// Integrated operator with coefficients frozen at (alpha, beta) on a periodic grid of N nodes.
inline Eigen::MatrixXd assemble_integrated_frozen_periodic(const DispersionCoefficients& dc, const ShockParams& p,
                                                           int N, double h, int stencil_order = 8) {
  if (N < 8) throw DomainError("periodic assembler: need N >= 8");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  auto add = [&](int row, int col_offset, int deriv, double c) {
    int width = centered_width(deriv, stencil_order), half = width / 2;
    std::vector<double> x(width);
    for (int i = 0; i < width; ++i) x[i] = double(i - half);
    auto wts = fornberg_weights(0.0, x, deriv);
    double sc = std::pow(h, deriv);
    int j = row % N;
    for (int i = 0; i < width; ++i) M(row, col_offset + ((j + i - half) % N + N) % N) += c * wts[i] / sc;
  };
  for (int j = 0; j < N; ++j) {
    add(j, 0, 1, p.s);
    add(j, N, 1, -1.0);
    add(N + j, 0, 1, dc.alpha);
    add(N + j, 0, 3, 0.5 * p.k * p.k);
    add(N + j, N, 1, dc.beta);
    add(N + j, N, 2, p.mu);
  }
  return M;
}

struct EigenOptions {
  double localization_threshold = 0.05;
  double outer_fraction = 0.1;
  int max_dense = 6000;
};

struct EigenReport {
  std::vector<cplx> eigenvalues;
  std::vector<double> localization;
  std::vector<int> point_candidates;
  double max_re_point = -std::numeric_limits<double>::infinity();
  int argmax_point = -1;
  double max_re_all = -std::numeric_limits<double>::infinity();
  std::optional<double> zero_mode_residual;
  double max_relative_residual = 0;  // max ||Av - lambda v|| / (||v|| ||A||)
  double conjugate_pairing = 0;      // max distance from conj(lambda) to the spectrum, over ||A||
  double matrix_norm = 0;
  int size = 0;
};

inline EigenReport eigen_solve(const DiscreteOperator& op, const EigenOptions& opt = {}) {
  const int N = int(op.matrix.rows());
  if (N > opt.max_dense)
    throw DomainError("eigen_solve: matrix size " + std::to_string(N) + " exceeds the dense limit " +
                      std::to_string(opt.max_dense) + "; lower eigen.n or raise the limit");
  auto d = real_eigen(op.matrix);
  EigenReport r;
  r.size = N;
  r.eigenvalues = d.values;
  r.matrix_norm = d.matrix_norm;
  if (op.kind == OperatorKind::original) r.zero_mode_residual = zero_mode_residual(op);

  // boundary mass per unknown
  std::vector<char> outer(N, 0);
  double lo = opt.outer_fraction * (op.n - 1), hi = (1.0 - opt.outer_fraction) * (op.n - 1);
  for (size_t i = 0; i < op.rho_nodes.size(); ++i) outer[i] = op.rho_nodes[i] < lo || op.rho_nodes[i] > hi;
  for (size_t i = 0; i < op.m_nodes.size(); ++i) {
    int node = op.m_nodes[i];
    outer[op.rho_nodes.size() + i] = node < lo || node > hi;
  }
  r.localization.resize(N);
  for (int j = 0; j < N; ++j) {
    auto m = eigenvector_mass(d, j);
    double tot = 0, out = 0;
    for (int i = 0; i < N; ++i) {
      tot += m[i];
      if (outer[i]) out += m[i];
    }
    r.localization[j] = tot > 0 ? out / tot : 1.0;
    double re = r.eigenvalues[j].real();
    r.max_re_all = std::max(r.max_re_all, re);
    if (r.localization[j] < opt.localization_threshold) {
      r.point_candidates.push_back(j);
      if (re > r.max_re_point) {
        r.max_re_point = re;
        r.argmax_point = j;
      }
    }
    if (d.matrix_norm > 0)
      r.max_relative_residual = std::max(r.max_relative_residual, d.residuals[j] / d.matrix_norm);
  }
  // conjugate closure: sort by real part and search a window
  std::vector<int> idx(N);
  for (int i = 0; i < N; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return r.eigenvalues[a].real() < r.eigenvalues[b].real(); });
  double tol_scale = std::max(d.matrix_norm, 1.0);
  for (int j = 0; j < N; ++j) {
    cplx c = std::conj(r.eigenvalues[j]);
    double best = std::numeric_limits<double>::infinity();
    auto it = std::lower_bound(idx.begin(), idx.end(), c.real() - 1e-6 * tol_scale,
                               [&](int a, double v) { return r.eigenvalues[a].real() < v; });
    for (; it != idx.end() && r.eigenvalues[*it].real() <= c.real() + 1e-6 * tol_scale; ++it)
      best = std::min(best, std::abs(r.eigenvalues[*it] - c));
    r.conjugate_pairing = std::max(r.conjugate_pairing, best / tol_scale);
  }
  return r;
}

struct PointVerdictOptions {
  double tol_margin = 1e-6;
  double match_distance = 1e-3;  // distance to the sampled Fredholm borders
};

enum class EigenClass { point_candidate, border_artifact, essential_artifact };

inline const char* class_name(EigenClass c) {
  switch (c) {
    case EigenClass::point_candidate: return "point_candidate";
    case EigenClass::border_artifact: return "border_artifact";
    default: return "essential_artifact";
  }
}

struct PointOffender {
  int index = 0;
  cplx lambda;
  double localization = 0;
  double border_distance = 0;
};

struct PointVerdict {
  bool pass = false;
  double margin = 0;  // -max Re over point candidates not matched to a border
  double tol_margin = 0, match_distance = 0;
  int candidates = 0, matched = 0;
  std::vector<EigenClass> classes;
  std::vector<PointOffender> offenders;
};

inline double distance_to_borders(cplx z, const BorderPair& b) {
  double d = std::numeric_limits<double>::infinity();
  for (const SpectrumCurve* c : {&b.plus, &b.minus})
    for (size_t i = 0; i < c->xi_grid.size(); ++i)
      d = std::min({d, std::abs(z - c->lambda_plus[i]), std::abs(z - c->lambda_minus[i])});
  return d;
}

inline PointVerdict stability_verdict(const EigenReport& r, const BorderPair& borders, const PointVerdictOptions& opt = {}) {
  PointVerdict v;
  v.tol_margin = opt.tol_margin;
  v.match_distance = opt.match_distance;
  v.classes.assign(r.eigenvalues.size(), EigenClass::essential_artifact);
  double worst = -std::numeric_limits<double>::infinity();
  for (int j : r.point_candidates) {
    ++v.candidates;
    cplx z = r.eigenvalues[j];
    double dist = distance_to_borders(z, borders);
    if (dist <= opt.match_distance) {
      v.classes[j] = EigenClass::border_artifact;
      ++v.matched;
      continue;
    }
    v.classes[j] = EigenClass::point_candidate;
    worst = std::max(worst, z.real());
    if (z.real() > -opt.tol_margin) v.offenders.push_back({j, z, r.localization[j], dist});
  }
  v.margin = -worst;
  v.pass = v.offenders.empty();
  return v;
}

}  // namespace qhd
