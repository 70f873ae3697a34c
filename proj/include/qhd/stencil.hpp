#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qhd {

// Fornberg's recursion: weights of the derivatives 0..m at x0 from the nodes x.
// Returns a (m+1) x x.size() table, row d holding the weights of the d-th derivative.
inline std::vector<std::vector<double>> fornberg_table(double x0, std::span<const double> x, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0, c4 = x[0] - x0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

inline std::vector<double> fornberg_weights(double x0, std::span<const double> x, int deriv) {
  return fornberg_table(x0, x, deriv)[deriv];
}

// How rows near the ends are closed.
//   one_sided:  the stencil window slides inside the grid (order kept, wider window)
//   zero_ghost: the centered stencil is kept and values beyond the grid are taken as zero
enum class Closure { one_sided, zero_ghost };

struct StencilRow {
  int first = 0;  // grid index of w[0]; may be negative for zero_ghost rows
  std::vector<double> w;
};

inline int centered_width(int deriv, int order) { return 2 * ((deriv + order - 1) / 2) + 1; }

// Finite-difference operator for the deriv-th derivative on a uniform grid.
class DiffOperator {
 public:
  DiffOperator() = default;
  DiffOperator(int n, double h, int deriv, int order, Closure closure = Closure::one_sided)
      : n_(n), h_(h), deriv_(deriv), order_(order), closure_(closure), rows_(n) {
    int wc = centered_width(deriv, order);
    int half = wc / 2;
    int wo = deriv + order;
    if (n < (closure == Closure::one_sided ? wo : 1))
      throw std::invalid_argument("DiffOperator: grid too small for requested order");
    std::vector<double> x;
    for (int j = 0; j < n; ++j) {
      int first, width;
      if (closure == Closure::zero_ghost || (j - half >= 0 && j + half < n)) {
        first = j - half;
        width = wc;
      } else {
        width = wo;
        first = std::clamp(j - width / 2, 0, n - width);
      }
      x.resize(width);
      for (int i = 0; i < width; ++i) x[i] = static_cast<double>(first + i - j);
      auto w = fornberg_weights(0.0, x, deriv);
      double scale = 1.0;
      for (int d = 0; d < deriv; ++d) scale *= h;
      for (auto& v : w) v /= scale;
      rows_[j] = {first, std::move(w)};
    }
  }

  int size() const { return n_; }
  double spacing() const { return h_; }
  int order() const { return order_; }
  int derivative() const { return deriv_; }
  const StencilRow& row(int j) const { return rows_[j]; }

  double apply_at(std::span<const double> u, int j) const {
    const auto& r = rows_[j];
    double acc = 0.0;
    for (std::size_t i = 0; i < r.w.size(); ++i) {
      int c = r.first + static_cast<int>(i);
      if (c >= 0 && c < n_) acc += r.w[i] * u[c];
    }
    return acc;
  }

  std::vector<double> apply(std::span<const double> u) const {
    std::vector<double> out(n_);
    for (int j = 0; j < n_; ++j) out[j] = apply_at(u, j);
    return out;
  }

 private:
  int n_ = 0;
  double h_ = 1.0;
  int deriv_ = 0, order_ = 0;
  Closure closure_ = Closure::one_sided;
  std::vector<StencilRow> rows_;
};

// Lagrange weights for evaluating a grid function at x0 from the given nodes.
inline std::vector<double> interpolation_weights(double x0, std::span<const double> x) {
  return fornberg_weights(x0, x, 0);
}

}  // namespace qhd
