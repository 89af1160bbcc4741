#pragma once

// Propagation under H(t) = gamma*h0 + Haux(t) with piecewise-constant
// auxiliary Hamiltonians, co-integrating F(t) = U^H K U so that the
// displacement generator K = i (dU/dgamma) U^H comes out of the same pass.
//
// Units: gamma is a frequency, t a time, h0 dimensionless and Haux carries
// frequency units (hbar absorbed), so gamma*t*h0 is a pure phase.

#include <vector>

#include "qest/opalg.hpp"

namespace qest {

struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  HermitianOp op;
};

/// Non-overlapping ascending segments on one space; gaps mean Haux = 0.
class Schedule {
 public:
  explicit Schedule(HilbertSpace space) : space_(std::move(space)) {}
  Schedule(HilbertSpace space, std::vector<Segment> segments);

  /// Sums possibly overlapping terms into elementary non-overlapping segments.
  static Schedule from_terms(HilbertSpace space, const std::vector<Segment>& terms);

  const HilbertSpace& space() const noexcept { return space_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  bool empty() const noexcept { return segments_.empty(); }

 private:
  HilbertSpace space_;
  std::vector<Segment> segments_;
};

enum class Quadrature {
  exact,     // closed-form integral over each constant-Hamiltonian step
  midpoint,  // U^H h0 U sampled at each substep midpoint
};

struct EvolutionOptions {
  /// 0 selects the default: phase <= 0.1 per substep, at least 16 per piece.
  int substeps_per_segment = 0;
  Quadrature quadrature = Quadrature::exact;
};

struct EvolutionResult {
  Matrix U;
  HermitianOp K;  // units of time
  double t_from = 0.0;
  double t_to = 0.0;
  double gamma = 0.0;
  double unitarity_residual = 0.0;
  int substeps = 0;
};

/// Propagator from t_from to t_to, plus the generator K of the same interval
/// (K = i (dU/dgamma) U^H for U = U(t_to, t_from)).
EvolutionResult evolve_interval(const HermitianOp& h0, const Schedule& aux, double gamma,
                                double t_from, double t_to, EvolutionOptions options = {});

inline EvolutionResult evolve(const HermitianOp& h0, const Schedule& aux, double gamma, double t,
                              EvolutionOptions options = {}) {
  return evolve_interval(h0, aux, gamma, 0.0, t, options);
}

Matrix evolve_unitary(const HermitianOp& h0, const Schedule& aux, double gamma, double t,
                      int substeps_per_segment = 0);

HermitianOp generator_K(const HermitianOp& h0, const Schedule& aux, double gamma, double t,
                        int substeps_per_segment = 0);

QuantumState evolve_state(const QuantumState& rho0, const Matrix& U);

struct KBoundReport {
  double lhs = 0.0;  // seminorm(K)
  double rhs = 0.0;  // t * seminorm(h0)
  double slack = 0.0;
  bool pass = false;
};

/// pass iff seminorm(K) <= t*seminorm(h0)*(1 + 1e-6) + 1e-9.
KBoundReport check_K_bound(const HermitianOp& K, double t, const HermitianOp& h0);

}  // namespace qest
