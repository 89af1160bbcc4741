#include "qest/opalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

namespace qest {

DimensionCapError::DimensionCapError(std::size_t requested, std::size_t cap)
    : Error("Hilbert-space dimension " + std::to_string(requested) + " exceeds cap " +
            std::to_string(cap) + " (set QEST_DIM_CAP to override)"),
      requested_(requested),
      cap_(cap) {}

ParseError::ParseError(const std::string& message, int line, int column, std::string token)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message +
            (token.empty() ? std::string() : " near '" + token + "'")),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

std::size_t dimension_cap() {
  static const std::size_t cap = [] {
    const char* env = std::getenv("QEST_DIM_CAP");
    if (env == nullptr || *env == '\0') return kDefaultDimCap;
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) return kDefaultDimCap;
    return static_cast<std::size_t>(v);
  }();
  return cap;
}

// ---------------------------------------------------------------------------
// HilbertSpace

HilbertSpace::HilbertSpace(std::vector<int> site_dims)
    : HilbertSpace(std::move(site_dims), dimension_cap()) {}

HilbertSpace::HilbertSpace(std::vector<int> site_dims, std::size_t cap)
    : site_dims_(std::move(site_dims)) {
  // saturating product so the error can report the requested size
  constexpr std::size_t kSaturate = std::size_t{1} << 48;
  std::size_t requested = 1;
  for (int d : site_dims_) {
    if (d < 2) throw InvalidArgument("site dimension must be >= 2, got " + std::to_string(d));
    requested = std::min(kSaturate, requested * static_cast<std::size_t>(d));
  }
  if (requested > cap) throw DimensionCapError(requested, cap);
  total_dim_ = requested;
}

HilbertSpace HilbertSpace::qubits(int n) {
  if (n < 0) throw InvalidArgument("negative qubit count");
  return HilbertSpace(std::vector<int>(static_cast<std::size_t>(n), 2));
}

int HilbertSpace::site_dim(int site) const {
  if (site < 0 || site >= num_sites()) {
    throw InvalidArgument("site index " + std::to_string(site) + " out of range [0, " +
                          std::to_string(num_sites()) + ")");
  }
  return site_dims_[static_cast<std::size_t>(site)];
}

HilbertSpace HilbertSpace::subspace(std::span<const int> sites) const {
  std::vector<int> dims;
  dims.reserve(sites.size());
  for (int s : sites) dims.push_back(site_dim(s));
  return HilbertSpace(std::move(dims));
}

HilbertSpace HilbertSpace::concat(const HilbertSpace& other) const {
  std::vector<int> dims = site_dims_;
  dims.insert(dims.end(), other.site_dims_.begin(), other.site_dims_.end());
  return HilbertSpace(std::move(dims));
}

std::vector<int> HilbertSpace::digits(std::size_t index) const {
  std::vector<int> out(site_dims_.size());
  for (std::size_t s = site_dims_.size(); s-- > 0;) {
    out[s] = static_cast<int>(index % static_cast<std::size_t>(site_dims_[s]));
    index /= static_cast<std::size_t>(site_dims_[s]);
  }
  return out;
}

std::size_t HilbertSpace::index(std::span<const int> digits) const {
  if (digits.size() != site_dims_.size()) throw InvalidArgument("digit count mismatch");
  std::size_t idx = 0;
  for (std::size_t s = 0; s < site_dims_.size(); ++s) {
    idx = idx * static_cast<std::size_t>(site_dims_[s]) + static_cast<std::size_t>(digits[s]);
  }
  return idx;
}

namespace {

std::vector<std::size_t> strides(const std::vector<int>& dims) {
  std::vector<std::size_t> out(dims.size());
  std::size_t stride = 1;
  for (std::size_t s = dims.size(); s-- > 0;) {
    out[s] = stride;
    stride *= static_cast<std::size_t>(dims[s]);
  }
  return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void check_square(const HilbertSpace& space, const Matrix& m) {
  if (m.rows() != space.size() || m.cols() != space.size()) {
    std::ostringstream os;
    os << "matrix is " << m.rows() << "x" << m.cols() << " but space dimension is "
       << space.dim();
    throw SpaceMismatchError(os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// HermitianOp

HermitianOp::HermitianOp(HilbertSpace space, Matrix m, double tol)
    : space_(std::move(space)), matrix_(std::move(m)) {
  check_square(space_, matrix_);
  Matrix adj = matrix_.adjoint();
  double dev = max_abs(matrix_ - adj);
  if (dev > tol * std::max(1.0, max_abs(matrix_))) {
    std::ostringstream os;
    os << "operator is not Hermitian (max |M - M^H| = " << dev << ")";
    throw NotHermitianError(os.str());
  }
  matrix_ = (matrix_ + adj) * 0.5;
}

HermitianOp HermitianOp::zero(const HilbertSpace& space) {
  return HermitianOp(space, Matrix::Zero(space.size(), space.size()));
}

HermitianOp HermitianOp::identity(const HilbertSpace& space) {
  return HermitianOp(space, Matrix::Identity(space.size(), space.size()));
}

HermitianOp HermitianOp::operator+(const HermitianOp& other) const {
  if (!(space_ == other.space_)) throw SpaceMismatchError("operator sum across different spaces");
  return HermitianOp(space_, matrix_ + other.matrix_);
}

HermitianOp HermitianOp::operator-(const HermitianOp& other) const {
  if (!(space_ == other.space_)) {
    throw SpaceMismatchError("operator difference across different spaces");
  }
  return HermitianOp(space_, matrix_ - other.matrix_);
}

HermitianOp HermitianOp::operator*(double s) const { return HermitianOp(space_, matrix_ * s); }

// ---------------------------------------------------------------------------
// Spectra

namespace {

void phase_fix(Eigen::Ref<Vector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::abs(v(i));
    if (a > 1e-10) {
      v *= std::conj(v(i)) / a;
      v(i) = cplx(a, 0.0);
      return;
    }
  }
}

// Re-spans a degenerate cluster deterministically. Works in the cluster's
// own coordinates: row j of the cluster block, conjugated, is P e_j expressed
// in that basis, and inner products are preserved because the block is an
// isometry.
void canonicalize_cluster(Matrix& vecs, Eigen::Index first, Eigen::Index count) {
  const Eigen::Index dim = vecs.rows();
  Matrix block = vecs.middleCols(first, count);
  Matrix coeffs(count, count);
  Eigen::Index accepted = 0;
  for (double threshold : {1e-6, 1e-9}) {
    for (Eigen::Index j = 0; j < dim && accepted < count; ++j) {
      Vector w = block.row(j).adjoint();
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index l = 0; l < accepted; ++l) {
          w -= coeffs.col(l) * coeffs.col(l).dot(w);
        }
      }
      double n = w.norm();
      if (n > threshold) coeffs.col(accepted++) = w / n;
    }
    if (accepted == count) break;
  }
  if (accepted < count) return;  // numerically rank-deficient; keep solver basis
  vecs.middleCols(first, count) = block * coeffs;
}

}  // namespace

SpectralDecomp spectral(const HermitianOp& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  SpectralDecomp out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  const Eigen::Index n = out.eigenvalues.size();
  if (n == 0) return out;
  const double scale = 1.0 + out.eigenvalues.cwiseAbs().maxCoeff();
  const double tie = 1e-9 * scale;
  Eigen::Index first = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || out.eigenvalues(i) - out.eigenvalues(i - 1) > tie) {
      out.clusters.emplace_back(first, i);
      first = i;
    }
  }
  for (auto [a, b] : out.clusters) {
    if (b - a > 1) canonicalize_cluster(out.eigenvectors, a, b - a);
    for (Eigen::Index c = a; c < b; ++c) phase_fix(out.eigenvectors.col(c));
  }
  return out;
}

RealVector eigenvalues(const HermitianOp& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  return es.eigenvalues();
}

double seminorm(const HermitianOp& h) {
  RealVector ev = eigenvalues(h);
  if (ev.size() == 0) return 0.0;
  return std::max(0.0, ev(ev.size() - 1) - ev(0));
}

// ---------------------------------------------------------------------------
// QuantumState

QuantumState QuantumState::pure(HilbertSpace space, Vector psi, double tol) {
  if (psi.size() != space.size()) {
    throw SpaceMismatchError("state vector length " + std::to_string(psi.size()) +
                             " does not match space dimension " + std::to_string(space.dim()));
  }
  double n = psi.norm();
  if (std::abs(n - 1.0) > tol) {
    std::ostringstream os;
    os << "state vector is not normalized (norm " << n << ")";
    throw InvalidArgument(os.str());
  }
  return QuantumState(std::move(space), std::move(psi));
}

QuantumState QuantumState::mixed(HilbertSpace space, Matrix rho, double tol) {
  HermitianOp herm(space, std::move(rho), tol);
  Matrix m = herm.matrix();
  double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << "density matrix trace is " << tr;
    throw InvalidArgument(os.str());
  }
  RealVector ev = eigenvalues(herm);
  if (ev.size() > 0 && ev(0) < -1e-10) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << ev(0);
    throw InvalidArgument(os.str());
  }
  return QuantumState(std::move(space), std::move(m));
}

QuantumState QuantumState::basis(const HilbertSpace& space, std::size_t index) {
  if (index >= space.dim()) throw InvalidArgument("basis index out of range");
  Vector v = Vector::Zero(space.size());
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return QuantumState(space, std::move(v));
}

QuantumState QuantumState::maximally_mixed(const HilbertSpace& space) {
  Matrix m = Matrix::Identity(space.size(), space.size()) / static_cast<double>(space.dim());
  return QuantumState(space, std::move(m));
}

const Vector& QuantumState::vector() const {
  if (!is_pure()) throw InvalidArgument("state is mixed; no state vector");
  return std::get<Vector>(data_);
}

Matrix QuantumState::density() const {
  if (const auto* v = std::get_if<Vector>(&data_)) return (*v) * v->adjoint();
  return std::get<Matrix>(data_);
}

double QuantumState::purity() const {
  if (is_pure()) return std::pow(std::get<Vector>(data_).squaredNorm(), 2);
  const Matrix& m = std::get<Matrix>(data_);
  return (m * m).trace().real();
}

cplx expectation(const QuantumState& s, const Matrix& op) {
  if (op.rows() != s.space().size() || op.cols() != s.space().size()) {
    throw SpaceMismatchError("operator and state live on different spaces");
  }
  if (s.is_pure()) {
    const Vector& v = s.vector();
    return v.dot(op * v);
  }
  return (s.density() * op).trace();
}

double expectation(const QuantumState& s, const HermitianOp& h) {
  if (!(s.space() == h.space())) throw SpaceMismatchError("operator and state spaces differ");
  return expectation(s, h.matrix()).real();
}

double variance(const QuantumState& s, const HermitianOp& h) {
  if (!(s.space() == h.space())) throw SpaceMismatchError("operator and state spaces differ");
  double mean;
  double second;
  if (s.is_pure()) {
    Vector hv = h.matrix() * s.vector();
    mean = s.vector().dot(hv).real();
    second = hv.squaredNorm();
  } else {
    Matrix rho = s.density();
    Matrix rh = rho * h.matrix();
    mean = rh.trace().real();
    second = (rh * h.matrix()).trace().real();
  }
  double var = second - mean * mean;
  if (var < 0.0 && var >= -1e-10) var = 0.0;
  return var;
}

QuantumState max_variance_state(const HermitianOp& h, double phase) {
  SpectralDecomp sd = spectral(h);
  const auto& bottom = sd.clusters.front();
  const auto& top = sd.clusters.back();
  Vector hi = sd.eigenvectors.col(top.first);
  if (sd.clusters.size() == 1) return QuantumState::pure(h.space(), hi, 1e-10);
  Vector lo = sd.eigenvectors.col(bottom.first);
  Vector psi = (hi + std::polar(1.0, phase) * lo) / std::sqrt(2.0);
  return QuantumState::pure(h.space(), psi, 1e-10);
}

// ---------------------------------------------------------------------------
// Embedding and partial trace

Matrix embed(const Matrix& op, std::span<const int> op_dims, std::span<const int> sites,
             const HilbertSpace& space) {
  if (op_dims.size() != sites.size()) {
    throw InvalidArgument("operator has " + std::to_string(op_dims.size()) +
                          " sites but " + std::to_string(sites.size()) + " placements given");
  }
  std::vector<bool> used(static_cast<std::size_t>(space.num_sites()), false);
  std::size_t op_dim = 1;
  for (std::size_t s = 0; s < sites.size(); ++s) {
    int site = sites[s];
    if (site < 0 || site >= space.num_sites()) {
      throw InvalidArgument("site index " + std::to_string(site) + " out of range [0, " +
                            std::to_string(space.num_sites()) + ")");
    }
    if (used[static_cast<std::size_t>(site)]) {
      throw InvalidArgument("site " + std::to_string(site) + " listed twice");
    }
    used[static_cast<std::size_t>(site)] = true;
    if (space.site_dim(site) != op_dims[s]) {
      throw SpaceMismatchError("site " + std::to_string(site) + " has dimension " +
                               std::to_string(space.site_dim(site)) + ", operator factor has " +
                               std::to_string(op_dims[s]));
    }
    op_dim *= static_cast<std::size_t>(op_dims[s]);
  }
  if (static_cast<std::size_t>(op.rows()) != op_dim || op.rows() != op.cols()) {
    throw SpaceMismatchError("operator size does not match its factor dimensions");
  }

  const auto full_strides = strides(space.site_dims());
  std::vector<int> sub_dims(op_dims.begin(), op_dims.end());
  const auto sub_strides = strides(sub_dims);

  // offset[c] = full-space displacement contributed by sub-index c
  std::vector<std::size_t> offset(op_dim, 0);
  for (std::size_t c = 0; c < op_dim; ++c) {
    std::size_t rem = c;
    for (std::size_t s = 0; s < sites.size(); ++s) {
      std::size_t digit = rem / sub_strides[s];
      rem %= sub_strides[s];
      offset[c] += digit * full_strides[static_cast<std::size_t>(sites[s])];
    }
  }

  const std::size_t dim = space.dim();
  Matrix out = Matrix::Zero(space.size(), space.size());
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t sub_i = 0;
    std::size_t base = i;
    for (std::size_t s = 0; s < sites.size(); ++s) {
      std::size_t st = full_strides[static_cast<std::size_t>(sites[s])];
      std::size_t digit = (i / st) % static_cast<std::size_t>(op_dims[s]);
      sub_i += digit * sub_strides[s];
      base -= digit * st;
    }
    for (std::size_t c = 0; c < op_dim; ++c) {
      cplx v = op(static_cast<Eigen::Index>(sub_i), static_cast<Eigen::Index>(c));
      if (v != cplx(0.0, 0.0)) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(base + offset[c])) = v;
      }
    }
  }
  return out;
}

HermitianOp embed(const HermitianOp& op, std::span<const int> sites, const HilbertSpace& space) {
  return HermitianOp(space, embed(op.matrix(), op.space().site_dims(), sites, space));
}

QuantumState partial_trace(const QuantumState& s, std::span<const int> keep) {
  const HilbertSpace& space = s.space();
  std::vector<bool> kept(static_cast<std::size_t>(space.num_sites()), false);
  for (int site : keep) {
    if (site < 0 || site >= space.num_sites()) {
      throw InvalidArgument("site index " + std::to_string(site) + " out of range [0, " +
                            std::to_string(space.num_sites()) + ")");
    }
    if (kept[static_cast<std::size_t>(site)]) {
      throw InvalidArgument("site " + std::to_string(site) + " listed twice");
    }
    kept[static_cast<std::size_t>(site)] = true;
  }
  std::vector<int> traced;
  for (int site = 0; site < space.num_sites(); ++site) {
    if (!kept[static_cast<std::size_t>(site)]) traced.push_back(site);
  }
  HilbertSpace keep_space = space.subspace(keep);
  HilbertSpace trace_space = space.subspace(traced);

  // full index for (kept sub-index a, traced sub-index t)
  const auto full_strides = strides(space.site_dims());
  auto offsets = [&](std::span<const int> sites, const HilbertSpace& sub) {
    std::vector<std::size_t> off(sub.dim(), 0);
    const auto sub_strides = strides(sub.site_dims());
    for (std::size_t c = 0; c < sub.dim(); ++c) {
      std::size_t rem = c;
      for (std::size_t k = 0; k < sites.size(); ++k) {
        std::size_t digit = rem / sub_strides[k];
        rem %= sub_strides[k];
        off[c] += digit * full_strides[static_cast<std::size_t>(sites[k])];
      }
    }
    return off;
  };
  const auto keep_off = offsets(keep, keep_space);
  const auto trace_off = offsets(traced, trace_space);

  const Eigen::Index nk = keep_space.size();
  const Eigen::Index nt = trace_space.size();
  Matrix reduced;
  if (s.is_pure()) {
    const Vector& psi = s.vector();
    Matrix m(nk, nt);
    for (Eigen::Index a = 0; a < nk; ++a) {
      for (Eigen::Index t = 0; t < nt; ++t) {
        m(a, t) = psi(static_cast<Eigen::Index>(keep_off[static_cast<std::size_t>(a)] +
                                                trace_off[static_cast<std::size_t>(t)]));
      }
    }
    reduced = m * m.adjoint();
  } else {
    Matrix rho = s.density();
    reduced = Matrix::Zero(nk, nk);
    for (Eigen::Index a = 0; a < nk; ++a) {
      for (Eigen::Index b = 0; b < nk; ++b) {
        cplx acc = 0.0;
        for (Eigen::Index t = 0; t < nt; ++t) {
          std::size_t to = trace_off[static_cast<std::size_t>(t)];
          acc += rho(static_cast<Eigen::Index>(keep_off[static_cast<std::size_t>(a)] + to),
                     static_cast<Eigen::Index>(keep_off[static_cast<std::size_t>(b)] + to));
        }
        reduced(a, b) = acc;
      }
    }
  }
  return QuantumState::mixed(keep_space, reduced, 1e-10);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

double unitarity_residual(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm();
}

namespace pauli {
Matrix I() { return Matrix::Identity(2, 2); }
Matrix X() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix Y() {
  Matrix m(2, 2);
  m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
  return m;
}
Matrix Z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

}  // namespace qest
