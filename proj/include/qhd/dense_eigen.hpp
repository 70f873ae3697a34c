#pragma once

#include <cblas.h>
#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qhd/errors.hpp"

namespace qhd {

// Eigenvalues and right eigenvectors of a real dense matrix (LAPACK dgeev:
// Hessenberg reduction + shifted QR).  Complex pairs follow the LAPACK packing:
// for a pair (j, j+1) the vectors are VR[:,j] +- i VR[:,j+1].
struct RealEigenDecomposition {
  std::vector<std::complex<double>> values;
  Eigen::MatrixXd vectors;
  std::vector<double> residuals;  // ||A v - lambda v|| / ||v|| per eigenvalue
  double matrix_norm = 0;         // Frobenius norm of A
};

inline RealEigenDecomposition real_eigen(const Eigen::MatrixXd& A, bool with_residuals = true) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  if (A.cols() != n) throw SolverError("real_eigen: matrix must be square", 0.0);
  RealEigenDecomposition out;
  out.matrix_norm = A.norm();
  if (n == 0) return out;
  Eigen::MatrixXd work = A;
  std::vector<double> wr(n), wi(n);
  out.vectors.resize(n, n);
  lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n, wr.data(), wi.data(), nullptr, 1,
                                  out.vectors.data(), n);
  if (info > 0)
    throw SolverError("real_eigen: QR iteration failed to converge; eigenvalues " + std::to_string(info + 1) +
                          ".." + std::to_string(n) + " are valid, index " + std::to_string(info) + " is not",
                      0.0);
  if (info < 0) throw SolverError("real_eigen: bad argument " + std::to_string(-info), 0.0);
  out.values.resize(n);
  for (lapack_int j = 0; j < n; ++j) out.values[j] = {wr[j], wi[j]};
  work.resize(0, 0);
  if (!with_residuals) return out;

  Eigen::MatrixXd AV(n, n);
  cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, n, n, 1.0, A.data(), n, out.vectors.data(), n, 0.0,
              AV.data(), n);
  out.residuals.assign(n, 0.0);
  for (lapack_int j = 0; j < n; ++j) {
    double a = wr[j], b = wi[j];
    if (b == 0.0) {
      double r = (AV.col(j) - a * out.vectors.col(j)).norm();
      out.residuals[j] = r / out.vectors.col(j).norm();
    } else {
      // pair (j, j+1): v = x + i y with lambda = a + i b
      auto x = out.vectors.col(j);
      auto y = out.vectors.col(j + 1);
      double re = (AV.col(j) - a * x + b * y).squaredNorm();
      double im = (AV.col(j + 1) - a * y - b * x).squaredNorm();
      double nv = std::sqrt(x.squaredNorm() + y.squaredNorm());
      out.residuals[j] = out.residuals[j + 1] = std::sqrt(re + im) / nv;
      ++j;
    }
  }
  return out;
}

// |v_i|^2 of eigenvector j, unpacking conjugate pairs.
inline std::vector<double> eigenvector_mass(const RealEigenDecomposition& d, int j) {
  const auto n = d.vectors.rows();
  std::vector<double> m(n);
  double b = d.values[j].imag();
  if (b == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) m[i] = d.vectors(i, j) * d.vectors(i, j);
  } else {
    int c = b > 0 ? j : j - 1;  // first column of the pair
    for (Eigen::Index i = 0; i < n; ++i)
      m[i] = d.vectors(i, c) * d.vectors(i, c) + d.vectors(i, c + 1) * d.vectors(i, c + 1);
  }
  return m;
}

}  // namespace qhd
