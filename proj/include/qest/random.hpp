#pragma once

// Random operators and states for property suites. Everything is driven by a
// caller-owned std::mt19937_64 so suites are reproducible from one seed.

#include <random>

#include "qest/opalg.hpp"

namespace qest::random {

using Engine = std::mt19937_64;

/// Ginibre-distributed complex matrix with unit-variance entries.
Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Engine& rng);
/// GUE-like Hermitian matrix (G + G^H)/2 scaled by `scale`.
HermitianOp hermitian(const HilbertSpace& space, Engine& rng, double scale = 1.0);
/// Haar unitary from the phase-corrected QR of a Ginibre matrix.
Matrix unitary(Eigen::Index dim, Engine& rng);
QuantumState pure_state(const HilbertSpace& space, Engine& rng);
/// Full-rank density matrix G G^H / tr(G G^H).
QuantumState mixed_state(const HilbertSpace& space, Engine& rng);
double uniform(Engine& rng, double lo, double hi);
int uniform_int(Engine& rng, int lo, int hi);  // inclusive

}  // namespace qest::random
