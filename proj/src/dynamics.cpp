#include "qest/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qest {

Schedule::Schedule(HilbertSpace space, std::vector<Segment> segments)
    : space_(std::move(space)), segments_(std::move(segments)) {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (!(s.t_start < s.t_end)) {
      std::ostringstream os;
      os << "schedule segment " << i << " has t_start " << s.t_start << " >= t_end " << s.t_end;
      throw InvalidArgument(os.str());
    }
    if (!(s.op.space() == space_)) {
      throw SpaceMismatchError("schedule segment " + std::to_string(i) +
                               " acts on a different space");
    }
    if (i > 0 && segments_[i - 1].t_end > s.t_start) {
      throw InvalidArgument("schedule segments overlap or are not ascending at segment " +
                            std::to_string(i));
    }
  }
}

Schedule Schedule::from_terms(HilbertSpace space, const std::vector<Segment>& terms) {
  std::vector<double> cuts;
  for (const Segment& s : terms) {
    if (!(s.t_start < s.t_end)) throw InvalidArgument("aux term with t_start >= t_end");
    if (!(s.op.space() == space)) throw SpaceMismatchError("aux term acts on a different space");
    cuts.push_back(s.t_start);
    cuts.push_back(s.t_end);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Segment> out;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c];
    const double b = cuts[c + 1];
    Matrix sum = Matrix::Zero(space.size(), space.size());
    bool active = false;
    for (const Segment& s : terms) {
      if (s.t_start <= a && s.t_end >= b) {
        sum += s.op.matrix();
        active = true;
      }
    }
    if (active) out.push_back(Segment{a, b, HermitianOp(space, std::move(sum))});
  }
  return Schedule(std::move(space), std::move(out));
}

namespace {

struct Piece {
  double a;
  double b;
  const HermitianOp* aux;  // nullptr in gaps
};

std::vector<Piece> pieces(const Schedule& aux, double t_from, double t_to) {
  std::vector<Piece> out;
  double cur = t_from;
  for (const Segment& s : aux.segments()) {
    if (s.t_end <= cur) continue;
    if (s.t_start >= t_to) break;
    if (s.t_start > cur) {
      out.push_back(Piece{cur, s.t_start, nullptr});
      cur = s.t_start;
    }
    double end = std::min(s.t_end, t_to);
    out.push_back(Piece{cur, end, &s.op});
    cur = end;
  }
  if (cur < t_to) out.push_back(Piece{cur, t_to, nullptr});
  return out;
}

// integral_0^T exp(i w s) ds
cplx phase_integral(double w, double T) {
  const double x = w * T;
  if (std::abs(x) < 1e-6) return T * cplx(1.0 - x * x / 6.0, x / 2.0);
  const double h = std::sin(0.5 * x);
  return T * cplx(std::sin(x) / x, 2.0 * h * h / x);
}

Matrix phase_diag(const Matrix& v, const RealVector& lambda, double dt) {
  Vector ph(lambda.size());
  for (Eigen::Index j = 0; j < lambda.size(); ++j) ph(j) = std::polar(1.0, -lambda(j) * dt);
  return v * ph.asDiagonal() * v.adjoint();
}

}  // namespace

EvolutionResult evolve_interval(const HermitianOp& h0, const Schedule& aux, double gamma,
                                double t_from, double t_to, EvolutionOptions options) {
  if (!(h0.space() == aux.space())) {
    throw SpaceMismatchError("coupling Hamiltonian and auxiliary schedule act on different spaces");
  }
  if (t_from < 0.0 || t_to < 0.0) throw InvalidArgument("evolution time must be non-negative");
  if (t_to < t_from) throw InvalidArgument("evolution interval ends before it starts");
  if (options.substeps_per_segment < 0) throw InvalidArgument("substeps must be >= 1");

  const Eigen::Index n = h0.space().size();
  const Matrix& h = h0.matrix();
  Matrix U = Matrix::Identity(n, n);
  Matrix F = Matrix::Zero(n, n);
  int steps = 0;
  double h0_spread = -1.0;

  for (const Piece& p : pieces(aux, t_from, t_to)) {
    const double T = p.b - p.a;
    Matrix A = gamma * h;
    if (p.aux != nullptr) A += p.aux->matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    if (es.info() != Eigen::Success) throw Error("eigendecomposition of the generator failed");
    const Matrix& V = es.eigenvectors();
    const RealVector& lambda = es.eigenvalues();

    if (options.quadrature == Quadrature::exact) {
      Matrix W = V.adjoint() * U;
      Matrix G = V.adjoint() * h * V;
      for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) G(r, c) *= phase_integral(lambda(r) - lambda(c), T);
      }
      F += W.adjoint() * G * W;
      Vector ph(n);
      for (Eigen::Index j = 0; j < n; ++j) ph(j) = std::polar(1.0, -lambda(j) * T);
      U = V * ph.asDiagonal() * W;
      ++steps;
      continue;
    }

    int substeps = options.substeps_per_segment;
    if (substeps == 0) {
      if (h0_spread < 0.0) h0_spread = seminorm(h0);
      double aux_spread = p.aux != nullptr ? seminorm(*p.aux) : 0.0;
      double phase = T * (std::abs(gamma) * h0_spread + aux_spread);
      substeps = std::max(16, static_cast<int>(std::ceil(phase / 0.1)));
    }
    const double dt = T / substeps;
    const Matrix half = phase_diag(V, lambda, 0.5 * dt);
    const Matrix full = phase_diag(V, lambda, dt);
    for (int s = 0; s < substeps; ++s) {
      Matrix mid = half * U;
      F += dt * (mid.adjoint() * h * mid);
      U = full * U;
    }
    steps += substeps;
  }

  EvolutionResult r{U, HermitianOp(h0.space(), U * F * U.adjoint(), kDerivedHermitianTol)};
  r.t_from = t_from;
  r.t_to = t_to;
  r.gamma = gamma;
  r.unitarity_residual = unitarity_residual(U);
  r.substeps = steps;
  return r;
}

Matrix evolve_unitary(const HermitianOp& h0, const Schedule& aux, double gamma, double t,
                      int substeps_per_segment) {
  return evolve(h0, aux, gamma, t, {substeps_per_segment, Quadrature::exact}).U;
}

HermitianOp generator_K(const HermitianOp& h0, const Schedule& aux, double gamma, double t,
                        int substeps_per_segment) {
  return evolve(h0, aux, gamma, t, {substeps_per_segment, Quadrature::exact}).K;
}

QuantumState evolve_state(const QuantumState& rho0, const Matrix& U) {
  if (U.rows() != rho0.space().size() || U.cols() != rho0.space().size()) {
    throw SpaceMismatchError("propagator dimension does not match the state");
  }
  if (rho0.is_pure()) return QuantumState::pure(rho0.space(), U * rho0.vector(), 1e-10);
  return QuantumState::mixed(rho0.space(), U * rho0.density() * U.adjoint(), 1e-10);
}

KBoundReport check_K_bound(const HermitianOp& K, double t, const HermitianOp& h0) {
  KBoundReport r;
  r.lhs = seminorm(K);
  r.rhs = t * seminorm(h0);
  r.slack = r.rhs - r.lhs;
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-6) + 1e-9;
  return r;
}

}  // namespace qest
