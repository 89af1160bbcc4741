#pragma once

// Dense Hermitian-operator algebra on finite tensor-product Hilbert spaces.
//
// Site 0 is the most significant tensor factor: an operator A on site 0 and
// B on site 1 of a two-site space is the Kronecker product A (x) B.

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qest/error.hpp"

namespace qest {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultDimCap = 4096;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDerivedHermitianTol = 1e-10;

/// Dimension cap: QEST_DIM_CAP from the environment if set, else 4096.
std::size_t dimension_cap();

class HilbertSpace {
 public:
  HilbertSpace() = default;
  explicit HilbertSpace(std::vector<int> site_dims);
  HilbertSpace(std::vector<int> site_dims, std::size_t cap);

  static HilbertSpace qubits(int n);

  const std::vector<int>& site_dims() const noexcept { return site_dims_; }
  int num_sites() const noexcept { return static_cast<int>(site_dims_.size()); }
  int site_dim(int site) const;
  std::size_t dim() const noexcept { return total_dim_; }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(total_dim_); }

  /// The space formed by the listed sites, in list order.
  HilbertSpace subspace(std::span<const int> sites) const;
  /// This space followed by `other`'s sites.
  HilbertSpace concat(const HilbertSpace& other) const;

  /// Mixed-radix digits of a basis index, most significant site first.
  std::vector<int> digits(std::size_t index) const;
  std::size_t index(std::span<const int> digits) const;

  bool operator==(const HilbertSpace& other) const noexcept {
    return site_dims_ == other.site_dims_;
  }

 private:
  std::vector<int> site_dims_;
  std::size_t total_dim_ = 1;
};

class HermitianOp {
 public:
  /// Replaces `m` by (m + m^H)/2. Throws NotHermitianError when the
  /// anti-Hermitian part exceeds tol * max(1, max|m_ij|).
  HermitianOp(HilbertSpace space, Matrix m, double tol = kHermitianTol);

  static HermitianOp zero(const HilbertSpace& space);
  static HermitianOp identity(const HilbertSpace& space);

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }

  HermitianOp operator+(const HermitianOp& other) const;
  HermitianOp operator-(const HermitianOp& other) const;
  HermitianOp operator*(double s) const;
  friend HermitianOp operator*(double s, const HermitianOp& op) { return op * s; }

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

struct SpectralDecomp {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns, canonical within degenerate clusters
  /// Half-open [first, last) column ranges of eigenvalue clusters.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
};

/// Ascending spectrum with deterministic eigenvectors. Inside a degenerate
/// cluster the basis is Gram-Schmidt over the cluster projector's columns in
/// index order; every vector has its first component (|c| > 1e-10) real
/// positive.
SpectralDecomp spectral(const HermitianOp& h);

RealVector eigenvalues(const HermitianOp& h);

/// Spectral spread M_H - m_H.
double seminorm(const HermitianOp& h);

class QuantumState {
 public:
  static QuantumState pure(HilbertSpace space, Vector psi, double tol = kHermitianTol);
  static QuantumState mixed(HilbertSpace space, Matrix rho, double tol = kHermitianTol);
  static QuantumState basis(const HilbertSpace& space, std::size_t index);
  static QuantumState maximally_mixed(const HilbertSpace& space);

  const HilbertSpace& space() const noexcept { return space_; }
  bool is_pure() const noexcept { return std::holds_alternative<Vector>(data_); }
  /// Throws InvalidArgument for a mixed state.
  const Vector& vector() const;
  Matrix density() const;
  double purity() const;

 private:
  QuantumState(HilbertSpace space, std::variant<Vector, Matrix> data)
      : space_(std::move(space)), data_(std::move(data)) {}

  HilbertSpace space_;
  std::variant<Vector, Matrix> data_;
};

cplx expectation(const QuantumState& s, const Matrix& op);
double expectation(const QuantumState& s, const HermitianOp& h);

/// <H^2> - <H>^2, clamped to 0 when within -1e-10.
double variance(const QuantumState& s, const HermitianOp& h);

/// (|M_H> + e^{i phase}|m_H>)/sqrt(2) built from the canonical extremal
/// eigenvectors; an eigenstate when the seminorm vanishes.
QuantumState max_variance_state(const HermitianOp& h, double phase = 0.0);

/// `op` acting on `sites` (op's first factor on sites[0]) and identity elsewhere.
Matrix embed(const Matrix& op, std::span<const int> op_dims, std::span<const int> sites,
             const HilbertSpace& space);
HermitianOp embed(const HermitianOp& op, std::span<const int> sites, const HilbertSpace& space);

/// Reduced density matrix on `keep`, in the order listed.
QuantumState partial_trace(const QuantumState& s, std::span<const int> keep);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix commutator(const Matrix& a, const Matrix& b);
double unitarity_residual(const Matrix& u);

namespace pauli {
Matrix I();
Matrix X();
Matrix Y();
Matrix Z();
}  // namespace pauli

}  // namespace qest
