#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "qest/probespec.hpp"
#include "qest/random.hpp"

using namespace qest;
namespace fs = std::filesystem;

namespace {

HermitianOp op1(const Matrix& m) { return HermitianOp(HilbertSpace::qubits(1), m); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> corpus(const char* sub) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fs::path(QEST_TEST_DATA) / "specs" / sub)) {
    if (e.path().extension() == ".qp") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Permutation of sites as a basis-state matrix (qubits).
Matrix permutation_matrix(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  const Eigen::Index dim = Eigen::Index(1) << n;
  Matrix p = Matrix::Zero(dim, dim);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    Eigen::Index out = 0;
    for (int s = 0; s < n; ++s) {
      const int bit = (idx >> (n - 1 - s)) & 1;
      out |= Eigen::Index(bit) << (n - 1 - perm[static_cast<std::size_t>(s)]);
    }
    p(out, idx) = 1.0;
  }
  return p;
}

}  // namespace

TEST_CASE("expression evaluation") {
  auto eval = [](const char* s) { return evaluate(*parse_expr(s)); };
  CHECK((eval("X").matrix - oracle::pauli('X')).norm() == 0.0);
  CHECK((eval("0.5*(I + Z)").matrix - Matrix(Eigen::Vector2cd(1, 0).asDiagonal())).norm() == 0.0);
  CHECK((eval("kron(Z, X)").matrix - oracle::pauli_string("ZX")).norm() == 0.0);
  CHECK((eval("-i*Z*X").matrix - oracle::pauli('Y')).norm() < 1e-15);
  CHECK(eval("2*i").is_scalar);
  CHECK(eval("2*i").scalar == cplx(0, 2));
  CHECK(eval("diag(1, 2, 3)").dim() == 3);
  CHECK_THROWS_AS(eval("X + kron(Z, Z)"), ParseError);
  CHECK_THROWS_AS(eval("X + 1"), ParseError);
  CHECK_THROWS_AS(parse_expr("kron(X)"), ParseError);
  CHECK_THROWS_AS(parse_expr("X +"), ParseError);
}

TEST_CASE("expression printing round trips") {
  for (const char* s : {"X", "-Z", "0.5*(I + Z)", "kron(X + i*Y, Z) - 2*kron(I, I)", "(X - Z) - (Y - I)",
                        "diag(1, -0.25, 3e-05)", "-(X + Y)", "X*Y*Z", "X - (Y + Z)"}) {
    ExprPtr e = parse_expr(s);
    ExprPtr again = parse_expr(to_string(*e));
    CHECK_MESSAGE(structurally_equal(*e, *again), s);
    CHECK(to_string(*again) == to_string(*e));
  }
}

TEST_CASE("parse errors carry line, column and token") {
  try {
    parse_probe_spec("probe {\n  n = 2;\n  coupling = product(X + i*Y);\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 22);
    CHECK(e.token() == "X");
    CHECK(std::string(e.what()).find("3:22") == 0);
  }
}

TEST_CASE("grammar smoke test") {
  ProbeSpec s = parse_probe_spec("probe { n=2; d=2; k=1; coupling=product(Z); state=cat; }");
  CHECK(s.n_systems == 2);
  CHECK(s.degree == 1);
  Probe p = build_probe(s);
  CHECK((p.h0.matrix() - (oracle::pauli_string("ZI") + oracle::pauli_string("IZ"))).norm() == 0.0);
}

TEST_CASE("explicit pairwise ZZ gives three terms") {
  ProbeSpec s = parse_probe_spec("probe { n=3; k=2; coupling=explicit(kron(Z,Z)); state=maxvar; }");
  Matrix expect = oracle::pauli_string("ZZI") + oracle::pauli_string("ZIZ") + oracle::pauli_string("IZZ");
  CHECK((build_probe(s).h0.matrix() - expect).norm() < 1e-14);
}

TEST_CASE("non-hermitian coupling is rejected") {
  CHECK_THROWS_AS(parse_probe_spec("probe { n=2; coupling=product(X+i*Y); }"), ParseError);
}

TEST_CASE("dimension cap passes through the parser") {
  CHECK_THROWS_AS(parse_probe_spec("probe { n=13; coupling=product(Z); }"), DimensionCapError);
}

TEST_CASE("spec validation errors") {
  CHECK_THROWS_AS(parse_probe_spec("probe { n=2; k=3; coupling=product(Z); }"), ParseError);
  CHECK_THROWS_AS(parse_probe_spec("probe { n=2; n=3; coupling=product(Z); }"), ParseError);
  CHECK_THROWS_AS(parse_probe_spec("probe { n=2; }"), ParseError);
  CHECK_THROWS_AS(parse_probe_spec("probe { n=2; coupling=product(Z); aux=[1, 0.5] X @ (0); }"),
                  ParseError);
  CHECK_THROWS_AS(parse_probe_spec("probe { n=2; coupling=product(Z); state=product(1,0,0); }"),
                  ParseError);
  CHECK_THROWS_AS(parse_probe_spec("probe { n=2; d=3; coupling=product(Z); }"), ParseError);
  CHECK_THROWS_AS(parse_probe_spec("probe { n=2; coupling=explicit(kron(Z,Z)); }"), ParseError);
}

TEST_CASE("corpus: valid specs round trip") {
  auto files = corpus("valid");
  CHECK(files.size() >= 20);
  for (const auto& f : files) {
    CAPTURE(f.filename().string());
    ProbeSpec s = parse_probe_spec(slurp(f));
    const std::string printed = to_string(s);
    ProbeSpec again = parse_probe_spec(printed);
    CHECK(structurally_equal(s, again));
    CHECK(to_string(again) == printed);
  }
}

TEST_CASE("corpus: malformed specs report positions") {
  auto files = corpus("malformed");
  CHECK(files.size() >= 5);
  for (const auto& f : files) {
    CAPTURE(f.filename().string());
    const std::string text = slurp(f);
    const auto tag = text.find("expect-error: ");
    REQUIRE(tag != std::string::npos);
    int line = 0, col = 0;
    char colon = 0;
    std::istringstream(text.substr(tag + 14)) >> line >> colon >> col;
    try {
      parse_probe_spec(text);
      FAIL("parsed a malformed spec");
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      CHECK(e.column() == col);
    }
  }
}

TEST_CASE("corpus covers every grammar production") {
  std::string all;
  for (const auto& f : corpus("valid")) all += slurp(f);
  for (const char* needle : {"n =", "d =", "k =", "product(", "explicit(kron", "ancillas = ()",
                             "ancillas = (2, 3)", "aux =", "state = cat", "state = maxvar",
                             "state = product(", "state = explicit(", "diag(", "kron(", "i*", "-Z",
                             " - ", "*", "((", "#", "e-1"}) {
    CHECK_MESSAGE(all.find(needle) != std::string::npos, needle);
  }
}

TEST_CASE("separable builder") {
  HermitianOp z = op1(pauli::Z());
  HermitianOp h2 = build_h0_separable(z, 2);
  Matrix expect = Matrix::Zero(4, 4);
  expect.diagonal() << 2, 0, 0, -2;
  CHECK((h2.matrix() - expect).norm() == 0.0);
  CHECK(seminorm(h2) == doctest::Approx(4.0));
  CHECK((build_h0_separable(z, 1).matrix() - z.matrix()).norm() == 0.0);
  CHECK(seminorm(build_h0_separable(z, 5)) == doctest::Approx(10.0));
}

TEST_CASE("k-body builder") {
  HermitianOp zz(HilbertSpace::qubits(2), oracle::pauli_string("ZZ"));
  HermitianOp h = build_h0_kbody(zz, 3, 2);
  auto ev = oracle::spectrum(h.matrix());
  CHECK(ev.back() == doctest::Approx(3.0));
  CHECK(ev.front() == doctest::Approx(-1.0));
  CHECK(seminorm(h) == doctest::Approx(4.0));
  CHECK(h.matrix()(0, 0).real() == doctest::Approx(3.0));
  CHECK((build_h0_kbody(zz, 2, 2).matrix() - zz.matrix()).norm() == 0.0);

  HermitianOp proj = op1(0.5 * (pauli::I() + pauli::Z()));
  CHECK(seminorm(build_h0_product(proj, 3, 2)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(build_h0_product(proj, 3, 2).matrix()(0, 0).real() == doctest::Approx(3.0));

  HermitianOp xz(HilbertSpace::qubits(2), oracle::pauli_string("XZ"));
  CHECK_THROWS_AS(build_h0_kbody(xz, 3, 2), InvalidArgument);
}

TEST_CASE("product builder: k = 1 equals separable exactly") {
  random::Engine rng(4);
  for (int t = 0; t < 10; ++t) {
    HermitianOp h = random::hermitian(HilbertSpace({3}), rng);
    CHECK((build_h0_product(h, 3, 1).matrix() - build_h0_separable(h, 3).matrix()).norm() == 0.0);
  }
}

TEST_CASE("nonnegative single-site spectra saturate the combinatorial bound") {
  random::Engine rng(8);
  for (int t = 0; t < 20; ++t) {
    const int n = random::uniform_int(rng, 2, 6);
    const int k = random::uniform_int(rng, 1, std::min(3, n));
    Matrix u = random::unitary(2, rng);
    const double lo = random::uniform(rng, 0.0, 0.5), hi = random::uniform(rng, 0.6, 1.5);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = lo;
    d(1, 1) = hi;
    HermitianOp h(HilbertSpace::qubits(1), u * d * u.adjoint(), 1e-10);
    const double expect = binomial(n, k) * (std::pow(hi, k) - std::pow(lo, k));
    CHECK(seminorm(build_h0_product(h, n, k)) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("k-body output is invariant under site permutations") {
  random::Engine rng(12);
  for (int t = 0; t < 10; ++t) {
    HermitianOp h = random::hermitian(HilbertSpace::qubits(1), rng);
    HermitianOp h0 = build_h0_product(h, 4, 2);
    std::vector<int> perm(4);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix p = permutation_matrix(perm);
    CHECK((p * h0.matrix() * p.adjoint() - h0.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("seminorm never exceeds the combinatorial bound") {
  random::Engine rng(13);
  for (int t = 0; t < 20; ++t) {
    HermitianOp h = random::hermitian(HilbertSpace::qubits(1), rng);
    const int n = random::uniform_int(rng, 2, 5);
    const int k = random::uniform_int(rng, 1, n);
    HermitianOp hk = tensor_power(h, k);
    CHECK(seminorm(build_h0_product(h, n, k)) <= binomial(n, k) * seminorm(hk) + 1e-9);
  }
}

TEST_CASE("Roy-Braunstein construction") {
  CHECK((build_rb_hamiltonian(1).matrix() - oracle::pauli('X')).norm() < 1e-15);
  Matrix two = Matrix::Zero(4, 4);
  two(0, 3) = two(3, 0) = 2.0;
  CHECK((build_rb_hamiltonian(2).matrix() - two).norm() < 1e-14);
  HermitianOp rb3 = build_rb_hamiltonian(3);
  CHECK(seminorm(rb3) == doctest::Approx(8.0));
  CHECK(std::sqrt(variance(max_variance_state(rb3), rb3)) == doctest::Approx(4.0));
}

TEST_CASE("Roy-Braunstein Pauli terms") {
  for (int n = 1; n <= 6; ++n) {
    auto terms = rb_pauli_terms(n);
    CHECK(terms.size() == std::size_t(1) << (n - 1));
    Matrix sum = Matrix::Zero(Eigen::Index(1) << n, Eigen::Index(1) << n);
    for (const auto& t : terms) sum += to_matrix(t);
    const Eigen::Index last = (Eigen::Index(1) << n) - 1;
    Matrix expect = Matrix::Zero(last + 1, last + 1);
    expect(0, last) = expect(last, 0) = std::pow(2.0, n - 1);
    CHECK((sum - expect).norm() < 1e-12);
    for (std::size_t a = 0; a < terms.size(); ++a) {
      for (std::size_t b = a + 1; b < terms.size(); ++b) {
        CHECK(commute(terms[a], terms[b]));
        Matrix ma = to_matrix(terms[a]), mb = to_matrix(terms[b]);
        CHECK((ma * mb - mb * ma).norm() < 1e-12);
      }
    }
  }
  CHECK_FALSE(commute({"XI", 1.0}, {"ZI", 1.0}));
  CHECK(commute({"XX", 1.0}, {"ZZ", 1.0}));
}

TEST_CASE("cat state") {
  QuantumState c2 = cat_state(op1(pauli::Z()), 2);
  Vector expect = Vector::Zero(4);
  expect(0) = expect(3) = 1.0 / std::sqrt(2.0);
  CHECK((c2.vector() - expect).norm() < 1e-15);
  HermitianOp x = op1(pauli::X());
  QuantumState c1 = cat_state(x, 1);
  CHECK(std::abs(c1.vector().dot(max_variance_state(x).vector())) == doctest::Approx(1.0));
  for (int n = 1; n <= 6; ++n) {
    CHECK(variance(cat_state(op1(pauli::Z()), n), build_h0_separable(op1(pauli::Z()), n)) ==
          doctest::Approx(double(n * n)));
  }
}

TEST_CASE("coupling summaries") {
  auto sum = [](const char* t) { return coupling_summary(parse_probe_spec(t)); };
  auto a = sum("probe { n=4; coupling=product(Z); }");
  CHECK(a.seminorm_h0 == doctest::Approx(8.0));
  CHECK(a.seminorm_bound == doctest::Approx(8.0));
  auto b = sum("probe { n=3; k=2; coupling=explicit(kron(Z,Z)); state=maxvar; }");
  CHECK(b.seminorm_h0 == doctest::Approx(4.0));
  CHECK(b.seminorm_bound == doctest::Approx(6.0));
  auto c = sum("probe { n=6; k=2; coupling=product(0.5*(I+Z)); }");
  CHECK(c.seminorm_h0 == doctest::Approx(15.0));
  CHECK(c.seminorm_bound == doctest::Approx(15.0));
  CHECK(*c.lambda_max == doctest::Approx(1.0));
  CHECK(*c.lambda_min == doctest::Approx(0.0));
}

TEST_CASE("probe construction places ancillas after the probe") {
  ProbeSpec s = parse_probe_spec("probe { n=2; coupling=product(Z); ancillas=(3); "
                                 "aux=[0,1] kron(X, diag(0,1,2)) @ (1, 2); }");
  Probe p = build_probe(s);
  CHECK(p.full_space.site_dims() == std::vector<int>{2, 2, 3});
  Vector psi = p.initial.vector();
  // cat (x) |0>: amplitude on |00,0> and |11,0>.
  CHECK(std::abs(psi(0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(psi(9)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  Matrix aux = oracle::kron(oracle::pauli('I'), oracle::kron(oracle::pauli('X'), Matrix(Eigen::Vector3cd(0, 1, 2).asDiagonal())));
  REQUIRE(p.aux.segments().size() == 1);
  CHECK((p.aux.segments()[0].op.matrix() - aux).norm() < 1e-14);
}

TEST_CASE("with_systems keeps the coupling expression") {
  ProbeSpec s = parse_probe_spec("probe { n=2; k=2; coupling=product(0.5*(I+Z)); }");
  ProbeSpec t = with_systems(s, 5);
  CHECK(t.n_systems == 5);
  CHECK(structurally_equal(*t.coupling.expr, *s.coupling.expr));
  CHECK(seminorm(build_probe(t).h0_probe) == doctest::Approx(10.0));
}
