#include "qest/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qest {

namespace {

const cplx kI(0.0, 1.0);

void require_same_space(const QuantumState& rho, const HermitianOp& op, const char* what) {
  if (!(rho.space() == op.space())) {
    throw SpaceMismatchError(std::string(what) + " and state live on different spaces");
  }
}

}  // namespace

HermitianOp sld_pure(const QuantumState& rho, const HermitianOp& K) {
  require_same_space(rho, K, "generator");
  double purity = rho.purity();
  if (std::abs(purity - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "sld_pure needs a pure state (purity " << purity << ")";
    throw InvalidArgument(os.str());
  }
  Matrix r = rho.density();
  return HermitianOp(rho.space(), -2.0 * kI * commutator(K.matrix(), r), kDerivedHermitianTol);
}

SldSolution sld_mixed(const QuantumState& rho, const HermitianOp& drho, double eig_floor) {
  require_same_space(rho, drho, "derivative");
  const Matrix& d = drho.matrix();
  const double scale = std::max(1.0, d.size() ? d.cwiseAbs().maxCoeff() : 0.0);
  if (std::abs(d.trace()) > 1e-10 * scale) {
    std::ostringstream os;
    os << "drho must be traceless (trace " << d.trace() << ")";
    throw InvalidArgument(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.density());
  if (es.info() != Eigen::Success) throw Error("eigendecomposition of rho failed");
  const Matrix& V = es.eigenvectors();
  const RealVector& p = es.eigenvalues();
  Matrix D = V.adjoint() * d * V;
  double kept = 0.0;
  double dropped = 0.0;
  for (Eigen::Index c = 0; c < D.cols(); ++c) {
    for (Eigen::Index r = 0; r < D.rows(); ++r) {
      const double w = std::norm(D(r, c));
      const double denom = p(r) + p(c);
      if (denom > eig_floor) {
        D(r, c) *= 2.0 / denom;
        kept += w;
      } else {
        D(r, c) = 0.0;
        dropped += w;
      }
    }
  }
  SldSolution out{HermitianOp(rho.space(), V * D * V.adjoint(), kDerivedHermitianTol)};
  out.truncated_fraction = kept + dropped > 0.0 ? dropped / (kept + dropped) : 0.0;
  return out;
}

double qfi(const QuantumState& rho, const HermitianOp& sld) {
  require_same_space(rho, sld, "SLD");
  double v;
  if (rho.is_pure()) {
    v = (sld.matrix() * rho.vector()).squaredNorm();
  } else {
    const Matrix& L = sld.matrix();
    v = (rho.density() * L * L).trace().real();
  }
  if (v < 0.0 && v >= -1e-10) v = 0.0;
  return v;
}

HermitianOp drho_dgamma(const HermitianOp& h0, const Schedule& aux, double gamma, double t,
                        const QuantumState& rho0) {
  EvolutionResult r = evolve(h0, aux, gamma, t);
  Matrix rho_t = evolve_state(rho0, r.U).density();
  return HermitianOp(h0.space(), -kI * commutator(r.K.matrix(), rho_t), kDerivedHermitianTol);
}

BoundChainReport bound_chain(const QuantumState& rho0, const HermitianOp& h0, const Schedule& aux,
                             double gamma, double t) {
  require_same_space(rho0, h0, "coupling Hamiltonian");
  EvolutionResult evo = evolve(h0, aux, gamma, t);
  QuantumState rho_t = evolve_state(rho0, evo.U);

  BoundChainReport r;
  r.pure = rho_t.is_pure();
  if (r.pure) {
    r.qfi = qfi(rho_t, sld_pure(rho_t, evo.K));
  } else {
    HermitianOp drho(h0.space(), -kI * commutator(evo.K.matrix(), rho_t.density()),
                     kDerivedHermitianTol);
    SldSolution sld = sld_mixed(rho_t, drho);
    r.qfi = qfi(rho_t, sld.sld);
    r.truncated_fraction = sld.truncated_fraction;
  }
  const double var = variance(rho_t, evo.K);
  r.sqrt_qfi = std::sqrt(r.qfi);
  r.two_delta_K = 2.0 * std::sqrt(var);
  r.variance_bound = 4.0 * var;
  r.seminorm_K = seminorm(evo.K);
  r.t_seminorm_h0 = t * seminorm(h0);
  r.slacks = {r.two_delta_K - r.sqrt_qfi, r.seminorm_K - r.two_delta_K,
              r.t_seminorm_h0 - r.seminorm_K};
  r.all_ordered = std::all_of(r.slacks.begin(), r.slacks.end(),
                              [](double s) { return s >= -kChainSlackTol; });
  return r;
}

BoundChainReport bound_chain(const QuantumState& rho0, const ProbeSpec& spec, double gamma,
                             double t) {
  Probe probe = build_probe(spec);
  return bound_chain(rho0, probe.h0, probe.aux, gamma, t);
}

}  // namespace qest
