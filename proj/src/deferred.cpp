#include <algorithm>
#include <cmath>

#include "qest/dynamics.hpp"
#include "qest/estimate.hpp"
#include "qest/random.hpp"

namespace qest {

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void check_shape(const DeferredCircuit& c) {
  const std::size_t na = c.first.size();
  if (c.after_first.size() != na || c.second.size() != na || c.after_second.size() != na ||
      c.last.size() != na) {
    throw InvalidArgument("deferred circuit: per-outcome lists disagree with the first measurement");
  }
  for (std::size_t a = 0; a < na; ++a) {
    if (c.after_second[a].size() != c.second[a].size() || c.last[a].size() != c.second[a].size()) {
      throw InvalidArgument("deferred circuit: second-round lists have inconsistent sizes");
    }
  }
}

}  // namespace

DeferredReport verify_deferred(const DeferredCircuit& c, const QuantumState& rho0) {
  check_shape(c);
  if (!(rho0.space() == c.space)) throw SpaceMismatchError("initial state and circuit spaces differ");
  const Eigen::Index n = c.space.size();
  const Matrix rho = c.initial * rho0.density() * c.initial.adjoint();
  const auto& pa = c.first.projectors();

  DeferredReport r;
  // Measure, branch, apply the conditioned unitary.
  for (std::size_t a = 0; a < pa.size(); ++a) {
    Matrix s = c.after_first[a] * (pa[a] * rho * pa[a]) * c.after_first[a].adjoint();
    const auto& pb = c.second[a].projectors();
    for (std::size_t b = 0; b < pb.size(); ++b) {
      Matrix u = c.after_second[a][b] * (pb[b] * s * pb[b]) * c.after_second[a][b].adjoint();
      for (const Matrix& pc : c.last[a][b].projectors()) {
        r.sequential.push_back((pc * u).trace().real());
      }
    }
  }

  // Controlled unitaries, then every measurement at the end.
  Matrix UA = Matrix::Zero(n, n);
  Matrix UAB = Matrix::Zero(n, n);
  for (std::size_t a = 0; a < pa.size(); ++a) {
    UA += c.after_first[a] * pa[a];
    const auto& pb = c.second[a].projectors();
    for (std::size_t b = 0; b < pb.size(); ++b) UAB += c.after_second[a][b] * pb[b] * pa[a];
  }
  r.unitarity_first = unitarity_residual(UA);
  r.unitarity_second = unitarity_residual(UAB);
  if (c.coherent_first) r.coherent_first_residual = max_abs(UA - *c.coherent_first);
  if (c.coherent_second) r.coherent_second_residual = max_abs(UAB - *c.coherent_second);

  const Matrix W = UAB * UA;
  const Matrix final_rho = W * rho * W.adjoint();
  for (std::size_t a = 0; a < pa.size(); ++a) {
    const auto& pb = c.second[a].projectors();
    for (std::size_t b = 0; b < pb.size(); ++b) {
      const Matrix branch = pb[b] * pa[a];
      for (const Matrix& pc : c.last[a][b].projectors()) {
        r.coherent.push_back((pc * branch * final_rho).trace().real());
      }
    }
  }

  for (std::size_t i = 0; i < r.sequential.size(); ++i) {
    r.max_abs_diff = std::max(r.max_abs_diff, std::abs(r.sequential[i] - r.coherent[i]));
    r.total_sequential += r.sequential[i];
    r.total_coherent += r.coherent[i];
  }
  r.pass = r.max_abs_diff <= kDeferredTol && std::abs(r.total_sequential - 1.0) <= kDeferredTol &&
           std::abs(r.total_coherent - 1.0) <= kDeferredTol && r.unitarity_first <= kDeferredTol &&
           r.unitarity_second <= kDeferredTol &&
           r.coherent_first_residual.value_or(0.0) <= kDeferredTol &&
           r.coherent_second_residual.value_or(0.0) <= kDeferredTol;
  return r;
}

DeferredCircuit random_deferred_circuit(std::uint64_t seed) {
  random::Engine rng(seed);
  const HilbertSpace space = HilbertSpace::qubits(4);
  const int probe[] = {0, 1};
  const int probe_upper[] = {0, 1, 2};
  const int upper[] = {2};
  const int lower[] = {3};
  const int zero[] = {0};
  const int one[] = {1};
  const HilbertSpace q1 = HilbertSpace::qubits(1);
  const HermitianOp z(q1, pauli::Z());
  const HermitianOp h0 = embed(z, zero, space) + embed(z, one, space);

  const double gamma = random::uniform(rng, 0.5, 2.0);
  const double t1 = random::uniform(rng, 0.2, 1.0);
  const double t2 = t1 + random::uniform(rng, 0.2, 1.0);
  const double t3 = t2 + random::uniform(rng, 0.2, 1.0);
  auto evolve_with = [&](const HermitianOp& haux, double from, double to) {
    Schedule s(space, {Segment{from, to, haux}});
    return evolve_interval(h0, s, gamma, from, to).U;
  };

  Matrix U = evolve_with(random::hermitian(space, rng), 0.0, t1);
  MeasurementSpec first = MeasurementSpec::in_basis(space, lower, random::unitary(2, rng));

  const HilbertSpace s3 = HilbertSpace::qubits(3);
  const HilbertSpace s2 = HilbertSpace::qubits(2);
  std::vector<Matrix> after_first;
  std::vector<MeasurementSpec> second;
  std::vector<std::vector<Matrix>> after_second;
  std::vector<std::vector<MeasurementSpec>> last;
  Matrix controlled_first = Matrix::Zero(space.size(), space.size());
  Matrix controlled_second = Matrix::Zero(space.size(), space.size());
  for (std::size_t a = 0; a < first.size(); ++a) {
    const Matrix& pa = first.projectors()[a];
    HermitianOp ha = embed(random::hermitian(s3, rng), probe_upper, space);
    after_first.push_back(evolve_with(ha, t1, t2));
    controlled_first += ha.matrix() * pa;

    second.push_back(MeasurementSpec::in_basis(space, upper, random::unitary(2, rng)));
    after_second.emplace_back();
    last.emplace_back();
    for (const Matrix& pb : second.back().projectors()) {
      HermitianOp hab = embed(random::hermitian(s2, rng), probe, space);
      after_second.back().push_back(evolve_with(hab, t2, t3));
      controlled_second += hab.matrix() * pb * pa;
      last.back().push_back(MeasurementSpec::in_basis(space, probe, random::unitary(4, rng)));
    }
  }

  DeferredCircuit c{space,  U,      std::move(first), std::move(after_first), std::move(second),
                    std::move(after_second), std::move(last), std::nullopt, std::nullopt};
  c.coherent_first = evolve_with(HermitianOp(space, controlled_first, kDerivedHermitianTol), t1, t2);
  c.coherent_second =
      evolve_with(HermitianOp(space, controlled_second, kDerivedHermitianTol), t2, t3);
  return c;
}

}  // namespace qest
