#pragma once

// Independent reference computations for tests. Nothing here calls the
// library's own propagators or solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// exp(-i H dt) by Pade scaling-and-squaring.
inline Matrix expm_i(const Matrix& h, double dt) {
  Matrix a = cplx(0.0, -dt) * h;
  return a.exp();
}

inline double rel_frob(const Matrix& a, const Matrix& ref) {
  const double n = ref.norm();
  return (a - ref).norm() / (n > 0.0 ? n : 1.0);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix pauli(char c) {
  Matrix m(2, 2);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

/// Pauli string such as "ZIZ", site 0 leftmost.
inline Matrix pauli_string(const char* s) {
  Matrix m = Matrix::Identity(1, 1);
  for (; *s; ++s) m = kron(m, pauli(*s));
  return m;
}

/// Eigenvalues by Jacobi-free route: characteristic spread via the
/// complex Schur form (independent of SelfAdjointEigenSolver).
inline std::vector<double> spectrum(const Matrix& h) {
  Eigen::ComplexSchur<Matrix> schur(h);
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < h.rows(); ++i) ev.push_back(schur.matrixT()(i, i).real());
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline double spread(const Matrix& h) {
  auto ev = spectrum(h);
  return ev.back() - ev.front();
}

}  // namespace oracle
