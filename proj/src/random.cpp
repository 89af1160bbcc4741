#include "qest/random.hpp"

#include <cmath>

namespace qest::random {

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Engine& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      double re = normal(rng);
      double im = normal(rng);
      m(i, j) = cplx(re, im);
    }
  }
  return m;
}

HermitianOp hermitian(const HilbertSpace& space, Engine& rng, double scale) {
  Matrix g = ginibre(space.size(), space.size(), rng);
  return HermitianOp(space, (g + g.adjoint()) * (0.5 * scale));
}

Matrix unitary(Eigen::Index dim, Engine& rng) {
  Matrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    double a = std::abs(r(i, i));
    if (a > 0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

QuantumState pure_state(const HilbertSpace& space, Engine& rng) {
  Vector v = ginibre(space.size(), 1, rng).col(0);
  v.normalize();
  return QuantumState::pure(space, v);
}

QuantumState mixed_state(const HilbertSpace& space, Engine& rng) {
  Matrix g = ginibre(space.size(), space.size(), rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return QuantumState::mixed(space, rho, 1e-10);
}

double uniform(Engine& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Engine& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace qest::random
