#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qest/opalg.hpp"
#include "qest/probespec.hpp"
#include "qest/random.hpp"

using namespace qest;

namespace {

HermitianOp op1(const Matrix& m) { return HermitianOp(HilbertSpace::qubits(1), m); }

HermitianOp diag_op(std::vector<double> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
  return HermitianOp(HilbertSpace({static_cast<int>(d.size())}), m);
}

}  // namespace

TEST_CASE("hilbert space dimensions and cap") {
  HilbertSpace s({2, 3, 2});
  CHECK(s.dim() == 12);
  CHECK(s.index(s.digits(7)) == 7);
  CHECK(s.digits(7) == std::vector<int>{1, 0, 1});
  CHECK_THROWS_AS(HilbertSpace({2, 1}), InvalidArgument);
  CHECK_THROWS_AS(HilbertSpace(std::vector<int>(13, 2), 4096), DimensionCapError);
  CHECK_NOTHROW(HilbertSpace(std::vector<int>(12, 2), 4096));
}

TEST_CASE("hermitian op rejects non-hermitian input") {
  Matrix m = pauli::X() + cplx(0, 1) * pauli::Y();
  CHECK_THROWS_AS(op1(m), NotHermitianError);
  Matrix nearly = pauli::Z();
  nearly(0, 1) = 1e-14;
  HermitianOp h = op1(nearly);
  CHECK(h.matrix()(0, 1).real() == doctest::Approx(0.5e-14));
  CHECK(h.matrix()(1, 0) == h.matrix()(0, 1));
}

TEST_CASE("seminorm examples") {
  CHECK(seminorm(op1(pauli::Z())) == doctest::Approx(2.0));
  CHECK(seminorm(HermitianOp::identity(HilbertSpace({2, 3}))) == doctest::Approx(0.0));
  // h0 = 2^(N-1) (|000><111| + h.c.): eigenvalues +-4, spread 2^N = 8.
  CHECK(seminorm(build_rb_hamiltonian(3)) == doctest::Approx(8.0));
}

TEST_CASE("spectral decomposition reconstructs and orders") {
  random::Engine rng(3);
  HilbertSpace s({2, 3});
  HermitianOp h = random::hermitian(s, rng);
  SpectralDecomp sd = spectral(h);
  const RealVector& l = sd.eigenvalues;
  for (Eigen::Index i = 1; i < l.size(); ++i) CHECK(l(i) >= l(i - 1));
  Matrix rec = sd.eigenvectors * l.cast<cplx>().asDiagonal() * sd.eigenvectors.adjoint();
  CHECK((rec - h.matrix()).norm() <= 1e-9 * (1.0 + l.cwiseAbs().maxCoeff()));
  auto ref = oracle::spectrum(h.matrix());
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(l(static_cast<Eigen::Index>(i)) == doctest::Approx(ref[i]).epsilon(1e-10));
}

TEST_CASE("degenerate clusters get a canonical basis") {
  // Z (x) I: top cluster spanned by |00>, |01>.
  HermitianOp h(HilbertSpace::qubits(2), oracle::pauli_string("ZI"));
  SpectralDecomp sd = spectral(h);
  REQUIRE(sd.clusters.size() == 2);
  const Matrix& v = sd.eigenvectors;
  CHECK(std::abs(v(0, 2) - 1.0) < 1e-12);
  CHECK(std::abs(v(1, 3) - 1.0) < 1e-12);
  // Rotating inside the degenerate subspace before diagonalizing does not move the basis.
  random::Engine rng(9);
  Matrix u = Matrix::Identity(4, 4);
  u.block(0, 0, 2, 2) = random::unitary(2, rng);
  HermitianOp h2(h.space(), u * h.matrix() * u.adjoint(), 1e-10);
  CHECK((spectral(h2).eigenvectors - v).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("variance examples") {
  const HilbertSpace q = HilbertSpace::qubits(1);
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(variance(QuantumState::pure(q, plus), op1(pauli::Z())) == doctest::Approx(1.0));
  CHECK(variance(QuantumState::basis(q, 0), op1(pauli::Z())) == doctest::Approx(0.0));
  for (int n = 1; n <= 6; ++n) {
    HermitianOp h0 = build_h0_separable(op1(pauli::Z()), n);
    CHECK(variance(cat_state(op1(pauli::Z()), n), h0) == doctest::Approx(double(n * n)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(variance(QuantumState::basis(HilbertSpace::qubits(2), 0), op1(pauli::Z())),
                  SpaceMismatchError);
}

TEST_CASE("max variance state examples") {
  QuantumState s = max_variance_state(op1(pauli::Z()), 0.0);
  CHECK(std::abs(s.vector()(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(s.vector()(1) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(variance(s, op1(pauli::Z())) == doctest::Approx(1.0));

  HermitianOp h = diag_op({3.0, 0.0, -1.0});
  for (double phase : {0.0, 0.7, 2.5}) {
    CHECK(variance(max_variance_state(h, phase), h) == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("max variance state with degenerate extremes beats brute force") {
  HermitianOp h(HilbertSpace::qubits(2), oracle::pauli_string("ZI"));
  QuantumState a = max_variance_state(h, 0.3);
  QuantumState b = max_variance_state(h, 0.3);
  CHECK((a.vector() - b.vector()).norm() == 0.0);
  CHECK(std::abs(variance(a, h) - 1.0) < 1e-10);
  // Brute force over equal-weight superpositions of vectors in the two extremal eigenspaces.
  double best = 0.0;
  const int steps = 24;
  const double pi = 3.14159265358979323846;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      const double th = pi * i / steps, ph = 2 * pi * j / steps;
      Vector up = Vector::Zero(4), dn = Vector::Zero(4);
      up(0) = std::cos(th / 2);
      up(1) = std::polar(std::sin(th / 2), ph);
      dn(2) = std::cos(ph / 2);
      dn(3) = std::polar(std::sin(ph / 2), th);
      Vector psi = (up + dn) / std::sqrt(2.0);
      const double m1 = (psi.adjoint() * h.matrix() * psi)(0, 0).real();
      const double m2 = (psi.adjoint() * h.matrix() * h.matrix() * psi)(0, 0).real();
      best = std::max(best, m2 - m1 * m1);
    }
  }
  CHECK(variance(a, h) >= best - 1e-12);
  CHECK(best == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embed examples") {
  HilbertSpace two = HilbertSpace::qubits(2);
  HilbertSpace three = HilbertSpace::qubits(3);
  const int site0[] = {0};
  CHECK((embed(op1(pauli::Z()), site0, two).matrix() - oracle::pauli_string("ZI")).norm() == 0.0);
  HermitianOp zz(two, oracle::pauli_string("ZZ"));
  const int s02[] = {0, 2};
  CHECK((embed(zz, s02, three).matrix() - oracle::pauli_string("ZIZ")).norm() == 0.0);
  HermitianOp xz(two, oracle::pauli_string("XZ"));
  const int s20[] = {2, 0};
  CHECK((embed(xz, s20, three).matrix() - oracle::pauli_string("ZIX")).norm() == 0.0);
  const int bad[] = {0, 3};
  CHECK_THROWS(embed(zz, bad, three));
  const int dup[] = {1, 1};
  CHECK_THROWS(embed(zz, dup, three));
  const int wrong_dim[] = {0, 1};
  CHECK_THROWS(embed(zz, wrong_dim, HilbertSpace({3, 2})));
}

TEST_CASE("embed preserves seminorm and linearity") {
  random::Engine rng(11);
  HilbertSpace space({2, 3, 2, 2});
  for (int trial = 0; trial < 20; ++trial) {
    HermitianOp a = random::hermitian(HilbertSpace({2, 2}), rng);
    HermitianOp b = random::hermitian(HilbertSpace({2, 2}), rng);
    std::vector<int> sites{0, 2, 3};
    std::shuffle(sites.begin(), sites.end(), rng);
    sites.resize(2);
    HermitianOp ea = embed(a, sites, space);
    CHECK(std::abs(oracle::spread(ea.matrix()) - oracle::spread(a.matrix())) < 1e-12 * (1 + seminorm(a)));
    const double s = random::uniform(rng, -2, 2);
    HermitianOp lhs = embed(a + b * s, sites, space);
    HermitianOp rhs = ea + embed(b, sites, space) * s;
    CHECK((lhs.matrix() - rhs.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("partial trace examples") {
  HilbertSpace q = HilbertSpace::qubits(1);
  Vector a(2), b(2);
  a << 0.6, 0.8;
  b << cplx(0, 1) / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  QuantumState prod = QuantumState::pure(HilbertSpace::qubits(2), oracle::kron(a, b));
  const int keep0[] = {0};
  const int keep1[] = {1};
  CHECK((partial_trace(prod, keep0).density() - a * a.adjoint()).norm() < 1e-12);
  CHECK((partial_trace(prod, keep1).density() - b * b.adjoint()).norm() < 1e-12);

  QuantumState cat = cat_state(op1(pauli::Z()), 3);
  const int keep01[] = {0, 1};
  Matrix m = partial_trace(cat, keep01).density();
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = expect(3, 3) = 0.5;
  CHECK((m - expect).norm() < 1e-12);
  CHECK_THROWS(partial_trace(cat, std::vector<int>{0, 5}));
}

TEST_CASE("partial trace: Schmidt spectra of both sides agree") {
  random::Engine rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    HilbertSpace s({2, 3, 2});
    QuantumState psi = random::pure_state(s, rng);
    auto left = oracle::spectrum(partial_trace(psi, std::vector<int>{0}).density());
    auto right = oracle::spectrum(partial_trace(psi, std::vector<int>{1, 2}).density());
    // Right has 6 eigenvalues, left 2; the nonzero ones coincide.
    CHECK(std::abs(left[0] - right[4]) < 1e-10);
    CHECK(std::abs(left[1] - right[5]) < 1e-10);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(right[static_cast<std::size_t>(j)]) < 1e-10);
  }
}

TEST_CASE("partial trace preserves trace and positivity") {
  random::Engine rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    HilbertSpace s({2, 2, 3});
    QuantumState rho = random::mixed_state(s, rng);
    std::vector<int> keep{2, 0};
    Matrix r = partial_trace(rho, keep).density();
    CHECK(std::abs(r.trace() - 1.0) < 1e-10);
    CHECK(oracle::spectrum(r).front() > -1e-10);
  }
}

TEST_CASE("seminorm properties on random operators") {
  random::Engine rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    HilbertSpace s({2, random::uniform_int(rng, 2, 3)});
    HermitianOp a = random::hermitian(s, rng, 2.0);
    HermitianOp b = random::hermitian(s, rng, 0.5);
    CHECK(seminorm(a + b) <= seminorm(a) + seminorm(b) + 1e-9);
    Matrix u = random::unitary(s.size(), rng);
    HermitianOp rot(s, u * a.matrix() * u.adjoint(), 1e-10);
    CHECK(std::abs(seminorm(rot) - seminorm(a)) <= 1e-9);
    CHECK(std::abs(seminorm(a) - oracle::spread(a.matrix())) <= 1e-9);
  }
}

TEST_CASE("variance bound over 1000 random states") {
  random::Engine rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    HilbertSpace s({random::uniform_int(rng, 2, 4)});
    HermitianOp h = random::hermitian(s, rng);
    QuantumState st = trial % 2 ? random::pure_state(s, rng) : random::mixed_state(s, rng);
    const double cap = seminorm(h) * seminorm(h) / 4.0;
    CHECK(variance(st, h) <= cap + 1e-9);
  }
}

TEST_CASE("max variance state attains the bound, degenerate spectra included") {
  random::Engine rng(78);
  for (int trial = 0; trial < 100; ++trial) {
    HilbertSpace s({2, 2});
    Matrix u = random::unitary(4, rng);
    RealVector d(4);
    // Repeated extremes in half the trials.
    d << -1.0, trial % 2 ? -1.0 : 0.3, 0.5, 2.0;
    if (trial % 4 == 1) d(2) = 2.0;
    HermitianOp h(s, u * d.cast<cplx>().asDiagonal() * u.adjoint(), 1e-10);
    const double cap = seminorm(h) * seminorm(h) / 4.0;
    CHECK(std::abs(variance(max_variance_state(h, 1.1), h) - cap) <= 1e-10 * std::max(1.0, cap));
  }
}
