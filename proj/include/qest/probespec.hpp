#pragma once

// Probe descriptions: coupling Hamiltonians (separable, k-body, product-form,
// Roy-Braunstein), cat states, combinatorial bounds, and the textual probe
// specification format.
//
//   probe {
//     n = 3; d = 2; k = 2;
//     coupling = product(0.5*(I + Z));   # or explicit(<k-site operator>)
//     ancillas = (2);                    # local dimensions, after the probe sites
//     state = cat;                       # cat | maxvar | product(c, ...) | explicit(c, ...)
//     aux = [0, 0.5] kron(X, X) @ (0, 3);
//   }

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qest/dynamics.hpp"
#include "qest/expr.hpp"
#include "qest/opalg.hpp"

namespace qest {

struct Coupling {
  enum class Form { product_local, explicit_kbody };
  Form form = Form::product_local;
  ExprPtr expr;
};

struct AuxTerm {
  double t_start = 0.0;
  double t_end = 0.0;
  ExprPtr term;
  std::vector<int> sites;  // over probe sites then ancilla sites
};

struct InitialState {
  enum class Kind { cat, maxvar, product, explicit_amplitudes };
  Kind kind = Kind::cat;
  /// product: one site vector repeated on every probe site.
  /// explicit: probe-space or full-space amplitudes. Normalized on use.
  std::vector<cplx> amplitudes;
};

struct ProbeSpec {
  int n_systems = 1;
  int local_dim = 2;
  int degree = 1;
  Coupling coupling;
  std::vector<AuxTerm> aux;
  std::vector<int> ancillas;
  InitialState state;
};

bool structurally_equal(const ProbeSpec& a, const ProbeSpec& b);

/// Parses and validates. Errors carry line/column and the offending token;
/// DimensionCapError is passed through unchanged.
ProbeSpec parse_probe_spec(std::string_view text);

/// Canonical text; parse_probe_spec(to_string(s)) is structurally equal to s.
std::string to_string(const ProbeSpec& spec);

/// Semantic checks for programmatically built specs.
void validate(const ProbeSpec& spec);

/// Copy with a different probe size (scaling sweeps).
ProbeSpec with_systems(const ProbeSpec& spec, int n);

// ---------------------------------------------------------------------------
// Hamiltonian builders

HermitianOp build_h0_separable(const HermitianOp& h_local, int n);

/// Sum of h_k over all C(n, k) site subsets in lexicographic order. Throws
/// InvalidArgument unless h_k is invariant under exchange of its sites
/// (tolerance 1e-10).
HermitianOp build_h0_kbody(const HermitianOp& h_k, int n, int k);

/// k-body coupling whose terms are products h_{j1}...h_{jk} of one local operator.
HermitianOp build_h0_product(const HermitianOp& h_local, int n, int k);

/// Tensor power of a single-site operator on k sites.
HermitianOp tensor_power(const HermitianOp& h_local, int k);

/// (Sigma_+ + Sigma_-)/2 with Sigma_+- = prod_j (X_j +- i Y_j).
HermitianOp build_rb_hamiltonian(int n);

struct PauliString {
  std::string ops;  // one of I, X, Y, Z per qubit
  double coeff = 1.0;
};

/// The 2^(n-1) Pauli products of the Roy-Braunstein Hamiltonian.
std::vector<PauliString> rb_pauli_terms(int n);
bool commute(const PauliString& a, const PauliString& b);
Matrix to_matrix(const PauliString& p);

/// (|lambda_M ... lambda_M> + |lambda_m ... lambda_m>)/sqrt(2), both branch
/// amplitudes real positive.
QuantumState cat_state(const HermitianOp& h_local, int n);

/// Exact binomial coefficient as a double (exact below 2^53).
double binomial(int n, int k);

// ---------------------------------------------------------------------------
// Built probes

/// A validated spec turned into operators on the probe+ancilla space.
struct Probe {
  ProbeSpec spec;
  HilbertSpace probe_space;
  HilbertSpace full_space;
  HermitianOp unit;      // h_local (product form) or h^(k) (explicit form)
  HermitianOp h0_probe;  // on the probe sites
  HermitianOp h0;        // embedded in the full space
  Schedule aux;
  QuantumState initial;
};

Probe build_probe(const ProbeSpec& spec);

struct CouplingSummary {
  HermitianOp h0;             // probe space
  double seminorm_h0 = 0.0;
  double seminorm_unit = 0.0;  // seminorm of h^(k)
  double binomial_nk = 0.0;
  double seminorm_bound = 0.0;  // C(N,k) * seminorm(h^(k))
  std::optional<double> lambda_max;  // product form only
  std::optional<double> lambda_min;
};

CouplingSummary coupling_summary(const ProbeSpec& spec);
CouplingSummary coupling_summary(const Probe& probe);

}  // namespace qest
