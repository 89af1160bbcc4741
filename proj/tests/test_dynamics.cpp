#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qest/dynamics.hpp"
#include "qest/probespec.hpp"
#include "qest/random.hpp"

using namespace qest;

namespace {

HermitianOp z_chain(int n) { return build_h0_separable(HermitianOp(HilbertSpace::qubits(1), pauli::Z()), n); }

// Time-ordered product of exponentials over a piecewise-constant schedule.
Matrix reference_U(const HermitianOp& h0, const Schedule& aux, double gamma, double t0, double t1) {
  std::vector<double> cuts{t0, t1};
  for (const auto& s : aux.segments()) {
    for (double c : {s.t_start, s.t_end}) if (c > t0 && c < t1) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  Matrix u = Matrix::Identity(h0.space().size(), h0.space().size());
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double mid = 0.5 * (cuts[j] + cuts[j + 1]);
    Matrix h = gamma * h0.matrix();
    for (const auto& s : aux.segments()) {
      if (mid > s.t_start && mid < s.t_end) h += s.op.matrix();
    }
    u = oracle::expm_i(h, cuts[j + 1] - cuts[j]) * u;
  }
  return u;
}

struct Config {
  HermitianOp h0;
  Schedule aux;
  double gamma;
  double t;
};

Config random_config(random::Engine& rng, int probe, int ancillas, int segments) {
  HilbertSpace space = HilbertSpace::qubits(probe + ancillas);
  HermitianOp local = random::hermitian(HilbertSpace::qubits(1), rng);
  std::vector<int> sites(static_cast<std::size_t>(probe));
  for (int j = 0; j < probe; ++j) sites[static_cast<std::size_t>(j)] = j;
  HermitianOp h0 = embed(build_h0_separable(local, probe), sites, space);
  const double t = random::uniform(rng, 0.5, 2.0);
  std::vector<Segment> segs;
  double edge = 0.0;
  for (int s = 0; s < segments; ++s) {
    const double a = edge + random::uniform(rng, 0.0, 0.2) * t;
    const double b = a + random::uniform(rng, 0.1, 0.3) * t;
    segs.push_back(Segment{a, b, random::hermitian(space, rng, 1.5)});
    edge = b;
  }
  return {h0, Schedule(space, segs), random::uniform(rng, 0.3, 1.5), t};
}

}  // namespace

TEST_CASE("schedule validation") {
  HilbertSpace s = HilbertSpace::qubits(1);
  HermitianOp x(s, pauli::X());
  CHECK_THROWS(Schedule(s, {Segment{0.0, 1.0, x}, Segment{0.5, 2.0, x}}));
  CHECK_THROWS(Schedule(s, {Segment{1.0, 0.5, x}}));
  CHECK_THROWS(Schedule(s, {Segment{0.0, 1.0, HermitianOp(HilbertSpace::qubits(2), oracle::pauli_string("XX"))}}));
  Schedule merged = Schedule::from_terms(s, {Segment{0.0, 1.0, x}, Segment{0.5, 2.0, x}});
  REQUIRE(merged.segments().size() == 3);
  CHECK((merged.segments()[1].op.matrix() - 2.0 * pauli::X()).norm() == 0.0);
  CHECK(merged.segments()[1].t_start == 0.5);
  CHECK(merged.segments()[1].t_end == 1.0);
}

TEST_CASE("no aux: U is the diagonal phase") {
  HermitianOp h0 = z_chain(3);
  Schedule none(h0.space());
  const double g = 0.7, t = 1.3;
  Matrix u = evolve_unitary(h0, none, g, t);
  for (Eigen::Index i = 0; i < 8; ++i) {
    const double lambda = h0.matrix()(i, i).real();
    CHECK(std::abs(u(i, i) - std::polar(1.0, -g * t * lambda)) < 1e-12);
  }
  CHECK(std::abs(u.norm() - std::sqrt(8.0)) < 1e-12);
  CHECK_THROWS(evolve_unitary(h0, none, g, -1.0));
}

TEST_CASE("commuting aux factorizes") {
  HermitianOp h0 = z_chain(2);
  HermitianOp zz(h0.space(), oracle::pauli_string("ZZ"));
  Schedule aux(h0.space(), {Segment{0.2, 0.9, zz}});
  const double g = 1.1, t = 1.5;
  Matrix u = evolve_unitary(h0, aux, g, t);
  Matrix expect = oracle::expm_i(g * h0.matrix(), t) * oracle::expm_i(zz.matrix(), 0.7);
  CHECK((u - expect).cwiseAbs().maxCoeff() < 1e-10);
  HermitianOp K = generator_K(h0, aux, g, t);
  CHECK((K.matrix() - t * h0.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("noncommuting aux matches the time-ordered oracle and finer substeps") {
  random::Engine rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Config c = random_config(rng, 2, 1, 2);
    Matrix u = evolve_unitary(c.h0, c.aux, c.gamma, c.t);
    CHECK((u - reference_U(c.h0, c.aux, c.gamma, 0.0, c.t)).cwiseAbs().maxCoeff() < 1e-10);
    Matrix fine = evolve_unitary(c.h0, c.aux, c.gamma, c.t, 160);
    CHECK((u - fine).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("no aux: K = t h0") {
  HermitianOp h0 = z_chain(3);
  Schedule none(h0.space());
  HermitianOp K = generator_K(h0, none, 0.4, 2.0);
  CHECK((K.matrix() - 2.0 * h0.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  random::Engine rng(5);
  HermitianOp dense = random::hermitian(HilbertSpace({2, 3}), rng);
  HermitianOp K2 = generator_K(dense, Schedule(dense.space()), 1.7, 0.8);
  CHECK((K2.matrix() - 0.8 * dense.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("K agrees with the finite-difference derivative of U") {
  random::Engine rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    Config c = random_config(rng, 2, trial % 3, 1 + trial % 3);
    HermitianOp K = generator_K(c.h0, c.aux, c.gamma, c.t);
    const double eps = 1e-5 * std::max(1.0, std::abs(c.gamma));
    Matrix up = reference_U(c.h0, c.aux, c.gamma + eps, 0.0, c.t);
    Matrix um = reference_U(c.h0, c.aux, c.gamma - eps, 0.0, c.t);
    Matrix u = reference_U(c.h0, c.aux, c.gamma, 0.0, c.t);
    Matrix fd = cplx(0, 1) * (up - um) / (2 * eps) * u.adjoint();
    CHECK(oracle::rel_frob(K.matrix(), fd) < 1e-6);
  }
}

TEST_CASE("generator bound holds for random schedules and ancillas") {
  random::Engine rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    Config c = random_config(rng, 1 + trial % 3, trial % 3, 1 + trial % 3);
    HermitianOp K = generator_K(c.h0, c.aux, c.gamma, c.t);
    KBoundReport r = check_K_bound(K, c.t, c.h0);
    CHECK(r.pass);
    CHECK(seminorm(K) <= c.t * seminorm(c.h0) + 1e-8);
  }
}

TEST_CASE("K bound report") {
  HermitianOp h0 = z_chain(2);
  KBoundReport ok = check_K_bound(h0 * 1.5, 1.5, h0);
  CHECK(ok.pass);
  CHECK(ok.lhs == doctest::Approx(ok.rhs));
  KBoundReport bad = check_K_bound(h0 * 3.0, 1.5, h0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.slack < 0.0);
}

TEST_CASE("composition of intervals") {
  random::Engine rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    Config c = random_config(rng, 2, 1, 3);
    const double t1 = random::uniform(rng, 0.1, 0.9) * c.t;
    EvolutionResult a = evolve_interval(c.h0, c.aux, c.gamma, 0.0, t1);
    EvolutionResult b = evolve_interval(c.h0, c.aux, c.gamma, t1, c.t);
    EvolutionResult whole = evolve(c.h0, c.aux, c.gamma, c.t);
    CHECK((b.U * a.U - whole.U).cwiseAbs().maxCoeff() < 1e-9);
    // Generators compose as K = K_b + U_b K_a U_b^H.
    Matrix k = b.K.matrix() + b.U * a.K.matrix() * b.U.adjoint();
    CHECK((k - whole.K.matrix()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("unitarity diagnostics") {
  random::Engine rng(66);
  Config c = random_config(rng, 3, 2, 3);
  EvolutionResult r = evolve(c.h0, c.aux, c.gamma, c.t);
  CHECK(r.unitarity_residual <= 1e-9);
  CHECK(unitarity_residual(r.U) <= 1e-9);
  CHECK((r.K.matrix() - r.K.matrix().adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("midpoint quadrature converges at second order") {
  random::Engine rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    Config c = random_config(rng, 2, 1, 2);
    auto K = [&](int n) {
      return evolve(c.h0, c.aux, c.gamma, c.t, {n, Quadrature::midpoint}).K.matrix();
    };
    const Matrix exact = evolve(c.h0, c.aux, c.gamma, c.t).K.matrix();
    const double e1 = (K(8) - exact).norm();
    const double e2 = (K(16) - exact).norm();
    const double e3 = (K(32) - exact).norm();
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);
    CHECK(e2 / e3 >= 3.5);
    CHECK(e2 / e3 <= 4.5);
  }
}

TEST_CASE("evolve_state examples") {
  random::Engine rng(88);
  HilbertSpace s = HilbertSpace::qubits(2);
  QuantumState rho = random::mixed_state(s, rng);
  QuantumState same = evolve_state(rho, Matrix::Identity(4, 4));
  CHECK((same.density() - rho.density()).norm() < 1e-15);
  Matrix u = random::unitary(4, rng);
  QuantumState moved = evolve_state(rho, u);
  CHECK(moved.purity() == doctest::Approx(rho.purity()).epsilon(1e-12));
  CHECK(std::abs(moved.density().trace() - 1.0) < 1e-10);

  const int n = 3;
  const double g = 0.3, t = 0.9;
  HermitianOp z = HermitianOp(HilbertSpace::qubits(1), pauli::Z());
  QuantumState cat = cat_state(z, n);
  QuantumState out = evolve_state(cat, evolve_unitary(build_h0_separable(z, n), Schedule(cat.space()), g, t));
  const Vector& v = out.vector();
  CHECK(std::abs(v(0)) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(std::abs(v(7)) == doctest::Approx(1 / std::sqrt(2.0)));
  const double phi = std::arg(v(7) / v(0));
  CHECK(std::abs(std::remainder(phi - g * t * n * 2, 2 * M_PI)) < 1e-12);
  CHECK_THROWS(evolve_state(cat, Matrix::Identity(4, 4)));
}
