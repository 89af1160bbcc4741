#pragma once

// Measurement and inference: Born sampling, the cat-state parity protocol,
// maximum-likelihood estimation over repeated probes, units-corrected
// deviations, and the deferred-measurement equivalence check.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qest/opalg.hpp"
#include "qest/probespec.hpp"

namespace qest {

// ---------------------------------------------------------------------------
// Random numbers

/// Counter-based stream: draw j of substream (seed, batch, trial) is a pure
/// function of those four integers, so batches can run in any order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t batch, std::uint64_t trial);
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// ---------------------------------------------------------------------------
// Projective measurements

class MeasurementSpec {
 public:
  /// Projectors must be orthogonal and sum to the identity within 1e-10.
  MeasurementSpec(HilbertSpace space, std::vector<Matrix> projectors,
                  std::vector<std::string> labels = {});

  /// Rank-one projectors onto the columns of `basis` (a unitary on the listed
  /// sites), embedded with identity elsewhere.
  static MeasurementSpec in_basis(const HilbertSpace& space, std::span<const int> sites,
                                  const Matrix& basis);

  const HilbertSpace& space() const noexcept { return space_; }
  const std::vector<Matrix>& projectors() const noexcept { return projectors_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return projectors_.size(); }

 private:
  HilbertSpace space_;
  std::vector<Matrix> projectors_;
  std::vector<std::string> labels_;
};

/// tr(P_a rho) for every outcome; throws if they do not sum to 1 within 1e-8.
std::vector<double> born_probabilities(const QuantumState& rho, const MeasurementSpec& m);

/// Inverse-CDF lookup of u in [0,1).
std::size_t sample_index(std::span<const double> probabilities, double u);

std::size_t born_sample(const QuantumState& rho, const MeasurementSpec& m, CounterRng& rng);

// ---------------------------------------------------------------------------
// Parity protocol

struct ParityProbabilities {
  double even = 0.0;
  double odd = 0.0;
};

/// Parity of per-site |+-> = (|lambda_M> +- |lambda_m>)/sqrt(2) outcomes on the
/// evolved cat state: p_even = (1 + cos phi)/2 with
/// phi = gamma t C(N,k) (lambda_M^k - lambda_m^k).
ParityProbabilities cat_protocol_distribution(double gamma, double t, int n, int k,
                                              double lambda_max, double lambda_min);

/// Even/odd/(other) measurement on all probe sites in the |+-> basis of the
/// single-site operator's extremal eigenvectors. Outcome order: even, odd, and
/// "other" when d > 2.
MeasurementSpec parity_measurement(const HermitianOp& h_local, int n);

/// p(gamma) = base + amplitude * cos(omega * gamma * t + offset) for outcome 0.
struct BinaryModel {
  double base = 0.5;
  double amplitude = 0.5;
  double omega = 1.0;
  double offset = 0.0;
  double t = 1.0;

  double success(double gamma) const;
};

struct BinomialCounts {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
};

struct MleOptions {
  double gamma_min = 0.0;
  double gamma_max = 1.0;
  int grid_points = 512;
  /// Refinement stops when the bracket is below this fraction of the window.
  double refine_fraction = 1e-6;
};

double log_likelihood(const BinomialCounts& counts, const BinaryModel& model, double gamma);

/// Grid search followed by golden-section refinement around the best grid point.
/// Ties go to the lowest grid index; a maximum on the window edge returns the edge.
double mle_estimate(const BinomialCounts& counts, const BinaryModel& model,
                    const MleOptions& options);

// ---------------------------------------------------------------------------
// Monte-Carlo estimation

struct EstimationConfig {
  std::uint64_t nu = 10000;
  double gamma_true = 0.0;
  double t = 1.0;
  std::uint64_t seed = 0;
  /// Estimator window; empty (min >= max) selects gamma_true +- 0.45 pi/(t omega).
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  int grid_points = 512;
  double refine_fraction = 1e-6;
  int batches = 1000;
};

struct EstimationReport {
  EstimationConfig config;  // with the resolved window
  std::string protocol;     // "cat_parity" or "product_sites"
  int n_systems = 0;
  int degree = 0;
  double seminorm_h0 = 0.0;
  double omega = 0.0;
  std::uint64_t trials_per_batch = 0;
  std::vector<double> estimates;  // one per batch at gamma_true
  double mean_estimate = 0.0;
  double mean_estimate_minus = 0.0;
  double mean_estimate_plus = 0.0;
  double fd_step = 0.0;
  double slope = 0.0;  // d<gamma_est>/dgamma
  double delta_gamma = 0.0;
  double bound = 0.0;  // 1/(sqrt(nu) t ||h0||)
  double ratio = 0.0;
  std::vector<std::string> warnings;
};

/// Default operating point gamma t ||h0|| = pi/2.
double operating_point(const ProbeSpec& spec, double t);

/// Validates the config against the anti-aliasing rule
/// (gamma_max - gamma_min) * t * ||h0|| < 2 pi.
EstimationReport run_monte_carlo(const ProbeSpec& spec, const EstimationConfig& config);

// ---------------------------------------------------------------------------
// Deferred measurement

/// Two rounds of mid-circuit measurement with classically conditioned
/// unitaries, then a conditioned final measurement:
///   C_abc = P_{c|ab} U_ab P_{b|a} U_a P_a U.
struct DeferredCircuit {
  HilbertSpace space;
  Matrix initial;                                   // U
  MeasurementSpec first;                            // {P_a}
  std::vector<Matrix> after_first;                  // U_a
  std::vector<MeasurementSpec> second;              // {P_{b|a}} per a
  std::vector<std::vector<Matrix>> after_second;    // U_{a,b}
  std::vector<std::vector<MeasurementSpec>> last;   // {P_{c|a,b}}
  /// Coherent controlled unitaries obtained by an independent route (e.g.
  /// integrating the controlled Hamiltonian); compared with the
  /// reconstructions when present.
  std::optional<Matrix> coherent_first;
  std::optional<Matrix> coherent_second;
};

struct DeferredReport {
  std::vector<double> sequential;  // p(a,b,c), a-major
  std::vector<double> coherent;
  double max_abs_diff = 0.0;
  double total_sequential = 0.0;
  double total_coherent = 0.0;
  double unitarity_first = 0.0;   // U_A = sum_a U_a P_a
  double unitarity_second = 0.0;  // U_AB = sum_ab U_ab P_{b|a} P_a
  std::optional<double> coherent_first_residual;
  std::optional<double> coherent_second_residual;
  bool pass = false;
};

inline constexpr double kDeferredTol = 1e-10;

DeferredReport verify_deferred(const DeferredCircuit& circuit, const QuantumState& rho0);

/// Random two-round circuit: 2-qubit probe (sites 0,1), upper ancilla
/// (site 2), lower ancilla (site 3). Conditioned unitaries are evolutions under
/// gamma*h0 + Haux with h0 = Z_0 + Z_1; the coherent versions integrate the
/// controlled Hamiltonians.
DeferredCircuit random_deferred_circuit(std::uint64_t seed);

}  // namespace qest
