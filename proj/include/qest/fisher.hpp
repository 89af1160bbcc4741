#pragma once

// Symmetric logarithmic derivative, quantum Fisher information and the
// precision chain  sqrt(I) <= 2 dK <= ||K|| <= t ||h0||.

#include <vector>

#include "qest/dynamics.hpp"
#include "qest/opalg.hpp"
#include "qest/probespec.hpp"

namespace qest {

inline constexpr double kDefaultEigFloor = 1e-12;

/// L = -2i[K, rho] for a pure rho (purity within 1e-10 of one).
HermitianOp sld_pure(const QuantumState& rho, const HermitianOp& K);

struct SldSolution {
  HermitianOp sld;
  /// Fraction of |drho|_F^2 living on eigenpairs with p_i + p_j <= eig_floor.
  double truncated_fraction = 0.0;
};

/// Solves (L rho + rho L)/2 = drho in the eigenbasis of rho:
/// L_ij = 2 drho_ij / (p_i + p_j), zero where p_i + p_j <= eig_floor.
SldSolution sld_mixed(const QuantumState& rho, const HermitianOp& drho,
                      double eig_floor = kDefaultEigFloor);

/// tr(rho L^2), clamped to 0 when within -1e-10.
double qfi(const QuantumState& rho, const HermitianOp& sld);

/// -i[K(t), rho(t)] for rho(t) = U rho0 U^H.
HermitianOp drho_dgamma(const HermitianOp& h0, const Schedule& aux, double gamma, double t,
                        const QuantumState& rho0);

struct BoundChainReport {
  double qfi = 0.0;
  double sqrt_qfi = 0.0;
  double two_delta_K = 0.0;
  double seminorm_K = 0.0;
  double t_seminorm_h0 = 0.0;
  /// 4 Var(K): equals qfi for pure states, an upper bound for mixed ones.
  double variance_bound = 0.0;
  double truncated_fraction = 0.0;
  bool pure = true;
  bool all_ordered = false;
  /// Differences between consecutive links of the chain.
  std::vector<double> slacks;
};

inline constexpr double kChainSlackTol = 1e-8;

BoundChainReport bound_chain(const QuantumState& rho0, const HermitianOp& h0, const Schedule& aux,
                             double gamma, double t);

BoundChainReport bound_chain(const QuantumState& rho0, const ProbeSpec& spec, double gamma,
                             double t);

}  // namespace qest
