#include "qest/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qest/dynamics.hpp"
#include "qest/estimate.hpp"
#include "qest/fisher.hpp"
#include "qest/probespec.hpp"
#include "qest/random.hpp"

namespace qest {

namespace {

random::Engine case_engine(std::uint64_t seed, int index) {
  return random::Engine(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1)));
}

void record(SuiteResult& r, int index, double violation, const std::string& what) {
  r.max_discrepancy = std::max(r.max_discrepancy, violation);
  ++r.failures;
  r.diagnostics.push_back("case " + std::to_string(index) + ": " + what);
}

}  // namespace

SuiteResult verify_chain(int cases, std::uint64_t seed) {
  if (cases < 0) throw InvalidArgument("cases must be non-negative");
  SuiteResult r;
  r.suite = "chain";
  r.cases = cases;
  for (int c = 0; c < cases; ++c) {
    random::Engine rng = case_engine(seed, c);
    const int n = random::uniform_int(rng, 1, 3);
    const int k = random::uniform_int(rng, 1, n);
    const int ancillas = random::uniform_int(rng, 0, 2);
    const HilbertSpace single = HilbertSpace::qubits(1);
    const HilbertSpace space = HilbertSpace::qubits(n + ancillas);

    HermitianOp h_probe = build_h0_product(random::hermitian(single, rng), n, k);
    std::vector<int> probe_sites(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) probe_sites[static_cast<std::size_t>(j)] = j;
    HermitianOp h0 = embed(h_probe, probe_sites, space);

    const double gamma = random::uniform(rng, 0.2, 2.0);
    const double t = random::uniform(rng, 0.2, 2.0);
    const int segments = random::uniform_int(rng, 0, 3);
    std::vector<double> cuts;
    for (int s = 0; s < 2 * segments; ++s) cuts.push_back(random::uniform(rng, 0.0, t));
    std::sort(cuts.begin(), cuts.end());
    std::vector<Segment> segs;
    for (int s = 0; s < segments; ++s) {
      const double a = cuts[static_cast<std::size_t>(2 * s)];
      const double b = cuts[static_cast<std::size_t>(2 * s + 1)];
      if (b - a < 1e-9) continue;
      segs.push_back(Segment{a, b, random::hermitian(space, rng, random::uniform(rng, 0.1, 3.0))});
    }
    Schedule aux(space, std::move(segs));

    const bool pure = random::uniform_int(rng, 0, 1) == 0;
    QuantumState rho0 = pure ? random::pure_state(space, rng) : random::mixed_state(space, rng);

    BoundChainReport chain = bound_chain(rho0, h0, aux, gamma, t);
    std::ostringstream os;
    os.precision(6);
    bool ok = true;
    double worst = 0.0;
    for (double s : chain.slacks) worst = std::max(worst, -s);
    if (!chain.all_ordered) {
      ok = false;
      os << "chain out of order (slacks " << chain.slacks[0] << ", " << chain.slacks[1] << ", "
         << chain.slacks[2] << ") ";
    }
    HermitianOp K = generator_K(h0, aux, gamma, t);
    KBoundReport kb = check_K_bound(K, t, h0);
    if (!kb.pass) {
      ok = false;
      worst = std::max(worst, kb.lhs - kb.rhs);
      os << "||K|| = " << kb.lhs << " exceeds t||h0|| = " << kb.rhs << ' ';
    }
    if (!chain.pure) {
      const double gap = chain.variance_bound - chain.qfi;
      if (!(gap > 1e-12 * std::max(1.0, chain.variance_bound))) {
        ok = false;
        worst = std::max(worst, -gap);
        os << "mixed-state QFI " << chain.qfi << " not strictly below 4Var(K) "
           << chain.variance_bound << ' ';
      }
    }
    if (!ok) {
      os << "[n=" << n << " k=" << k << " ancillas=" << ancillas << " segments=" << segments
         << " gamma=" << gamma << " t=" << t << (pure ? " pure" : " mixed") << ']';
      record(r, c, worst, os.str());
    }
  }
  return r;
}

SuiteResult verify_deferred_suite(int cases, std::uint64_t seed) {
  if (cases < 0) throw InvalidArgument("cases must be non-negative");
  SuiteResult r;
  r.suite = "deferred";
  r.cases = cases;
  for (int c = 0; c < cases; ++c) {
    random::Engine rng = case_engine(seed, c);
    DeferredCircuit circuit = random_deferred_circuit(rng());
    const bool pure = random::uniform_int(rng, 0, 1) == 0;
    QuantumState rho0 =
        pure ? random::pure_state(circuit.space, rng) : random::mixed_state(circuit.space, rng);
    DeferredReport rep = verify_deferred(circuit, rho0);
    const double worst =
        std::max({rep.max_abs_diff, rep.unitarity_first, rep.unitarity_second,
                  rep.coherent_first_residual.value_or(0.0),
                  rep.coherent_second_residual.value_or(0.0),
                  std::abs(rep.total_sequential - 1.0), std::abs(rep.total_coherent - 1.0)});
    r.max_discrepancy = std::max(r.max_discrepancy, worst);
    if (!rep.pass) {
      std::ostringstream os;
      os.precision(3);
      os << "max |p_seq - p_coh| = " << rep.max_abs_diff << ", unitarity " << rep.unitarity_first
         << " / " << rep.unitarity_second << ", coherent residuals "
         << rep.coherent_first_residual.value_or(0.0) << " / "
         << rep.coherent_second_residual.value_or(0.0);
      record(r, c, worst, os.str());
    }
  }
  return r;
}

SuiteResult verify_seminorm(int cases, std::uint64_t seed) {
  if (cases < 0) throw InvalidArgument("cases must be non-negative");
  SuiteResult r;
  r.suite = "seminorm";
  r.cases = cases;
  for (int c = 0; c < cases; ++c) {
    random::Engine rng = case_engine(seed, c);
    std::vector<int> dims(static_cast<std::size_t>(random::uniform_int(rng, 1, 3)));
    for (int& d : dims) d = random::uniform_int(rng, 2, 3);
    const HilbertSpace space(dims);
    HermitianOp a = random::hermitian(space, rng, random::uniform(rng, 0.1, 5.0));
    HermitianOp b = random::hermitian(space, rng, random::uniform(rng, 0.1, 5.0));
    const double na = seminorm(a);
    const double nb = seminorm(b);
    const double scale = std::max(1.0, na + nb);
    const double tol = 1e-10 * scale;

    std::ostringstream os;
    os.precision(6);
    double worst = 0.0;
    bool ok = true;
    auto check = [&](double violation, const char* what) {
      if (violation > tol) {
        ok = false;
        worst = std::max(worst, violation);
        os << what << " off by " << violation << "; ";
      }
    };

    check(seminorm(a + b) - (na + nb), "subadditivity");
    Matrix u = random::unitary(space.size(), rng);
    check(std::abs(seminorm(HermitianOp(space, u * a.matrix() * u.adjoint(), kDerivedHermitianTol)) - na),
          "unitary invariance");
    const double s = random::uniform(rng, -3.0, 3.0);
    check(std::abs(seminorm(a * s) - std::abs(s) * na), "scaling");
    check(std::abs(seminorm(a + HermitianOp::identity(space) * s) - na), "identity shift");

    const double cap = na * na / 4.0;
    QuantumState psi = random::pure_state(space, rng);
    QuantumState rho = random::mixed_state(space, rng);
    check(variance(psi, a) - cap, "pure-state variance bound");
    check(variance(rho, a) - cap, "mixed-state variance bound");
    const double phase = random::uniform(rng, 0.0, 6.283185307179586);
    check(std::abs(variance(max_variance_state(a, phase), a) - cap), "maximizer variance");

    if (!ok) {
      os << "[dims";
      for (int d : dims) os << ' ' << d;
      os << ']';
      record(r, c, worst, os.str());
    }
  }
  return r;
}

SuiteResult run_suite(std::string_view name, int cases, std::uint64_t seed) {
  if (name == "chain") return verify_chain(cases, seed);
  if (name == "deferred") return verify_deferred_suite(cases, seed);
  if (name == "seminorm") return verify_seminorm(cases, seed);
  throw InvalidArgument("unknown suite '" + std::string(name) + "' (chain | deferred | seminorm)");
}

}  // namespace qest
