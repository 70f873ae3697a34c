#pragma once

#include <lapacke.h>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "qhd/errors.hpp"

namespace qhd {

// General band matrix in LAPACK layout, solved by dgbsv (partial pivoting).
class BandMatrix {
 public:
  BandMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<size_t>(ldab_) * n, 0.0) {}

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

  // throws if (i, j) falls outside the declared band
  double& at(int i, int j) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || !in_band(i, j))
      throw std::out_of_range("BandMatrix: entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside band");
    return ab_[static_cast<size_t>(j) * ldab_ + kl_ + ku_ + i - j];
  }

  void clear() { std::fill(ab_.begin(), ab_.end(), 0.0); }

  // Solves in place; the matrix is overwritten by its LU factors.
  void solve(std::vector<double>& rhs) {
    std::vector<lapack_int> ipiv(n_);
    lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, n_, kl_, ku_, 1, ab_.data(), ldab_, ipiv.data(), rhs.data(), n_);
    if (info > 0) throw SolverError("banded solve: singular pivot at row " + std::to_string(info), 0.0);
    if (info < 0) throw SolverError("banded solve: bad argument " + std::to_string(-info), 0.0);
  }

 private:
  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
};

}  // namespace qhd
