#include "qest/probespec.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace qest {

namespace {

Matrix eval_operator(const Expr& e, const char* what) {
  ExprValue v = evaluate(e);
  if (v.is_scalar) {
    throw ParseError(std::string(what) + " must be an operator, not a scalar", e.line, e.column,
                     "");
  }
  return v.matrix;
}

cplx eval_scalar(const Expr& e) {
  ExprValue v = evaluate(e);
  if (!v.is_scalar) throw ParseError("expected a complex scalar", e.line, e.column, "");
  return v.scalar;
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int j = 0; j < exp; ++j) r *= base;
  return r;
}

std::vector<int> iota_sites(int first, int count) {
  std::vector<int> v(static_cast<std::size_t>(count));
  std::iota(v.begin(), v.end(), first);
  return v;
}

Vector kron_vec(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Vector tensor_power(const Vector& v, int n) {
  Vector out = Vector::Ones(1);
  for (int j = 0; j < n; ++j) out = kron_vec(out, v);
  return out;
}

std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx = iota_sites(0, k);
  while (true) {
    out.push_back(idx);
    int j = k - 1;
    while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - k + j) --j;
    if (j < 0) break;
    ++idx[static_cast<std::size_t>(j)];
    for (int l = j + 1; l < k; ++l) {
      idx[static_cast<std::size_t>(l)] = idx[static_cast<std::size_t>(l - 1)] + 1;
    }
  }
  return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// Validation pieces, each throwing library errors

HilbertSpace probe_space_of(const ProbeSpec& s) {
  return HilbertSpace(std::vector<int>(static_cast<std::size_t>(s.n_systems), s.local_dim));
}

HilbertSpace full_space_of(const ProbeSpec& s) {
  std::vector<int> dims(static_cast<std::size_t>(s.n_systems), s.local_dim);
  dims.insert(dims.end(), s.ancillas.begin(), s.ancillas.end());
  return HilbertSpace(std::move(dims));
}

void validate_sizes(const ProbeSpec& s) {
  if (s.n_systems < 1) throw InvalidArgument("n must be >= 1");
  if (s.local_dim < 2) throw InvalidArgument("d must be >= 2");
  if (s.degree < 1 || s.degree > s.n_systems) {
    throw InvalidArgument("k must satisfy 1 <= k <= n (k = " + std::to_string(s.degree) +
                          ", n = " + std::to_string(s.n_systems) + ")");
  }
  probe_space_of(s);
}

void validate_ancillas(const ProbeSpec& s) {
  for (int d : s.ancillas) {
    if (d < 2) throw InvalidArgument("ancilla dimension must be >= 2, got " + std::to_string(d));
  }
  full_space_of(s);
}

HermitianOp unit_operator(const ProbeSpec& s) {
  if (!s.coupling.expr) throw InvalidArgument("coupling expression missing");
  Matrix m = eval_operator(*s.coupling.expr, "coupling");
  const int sites = s.coupling.form == Coupling::Form::product_local ? 1 : s.degree;
  const std::size_t want = ipow(static_cast<std::size_t>(s.local_dim), sites);
  if (static_cast<std::size_t>(m.rows()) != want) {
    throw SpaceMismatchError("coupling operator is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.rows()) + " but " +
                             (sites == 1 ? std::string("one site")
                                         : std::to_string(sites) + " sites") +
                             " of dimension " + std::to_string(s.local_dim) + " need " +
                             std::to_string(want));
  }
  HilbertSpace space(std::vector<int>(static_cast<std::size_t>(sites), s.local_dim));
  try {
    return HermitianOp(space, m);
  } catch (const NotHermitianError&) {
    throw NotHermitianError("non-Hermitian coupling term");
  }
}

void check_exchange_symmetric(const HermitianOp& h_k) {
  const int k = h_k.space().num_sites();
  const double tol = 1e-10 * std::max(1.0, max_abs(h_k.matrix()));
  for (int j = 0; j + 1 < k; ++j) {
    std::vector<int> perm = iota_sites(0, k);
    std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(j + 1)]);
    Matrix swapped = embed(h_k.matrix(), h_k.space().site_dims(), perm, h_k.space());
    if (max_abs(swapped - h_k.matrix()) > tol) {
      throw InvalidArgument("k-body coupling is not symmetric under exchange of sites " +
                            std::to_string(j) + " and " + std::to_string(j + 1));
    }
  }
}

void validate_coupling(const ProbeSpec& s) {
  HermitianOp unit = unit_operator(s);
  if (s.coupling.form == Coupling::Form::explicit_kbody) check_exchange_symmetric(unit);
}

void validate_state(const ProbeSpec& s) {
  const auto& st = s.state;
  switch (st.kind) {
    case InitialState::Kind::cat: {
      if (s.coupling.form != Coupling::Form::product_local) {
        throw InvalidArgument("state=cat needs a product(...) coupling to define single-site "
                              "extremal eigenstates");
      }
      if (seminorm(unit_operator(s)) == 0.0) {
        throw InvalidArgument("state=cat needs a single-site operator with distinct extremal "
                              "eigenvalues");
      }
      break;
    }
    case InitialState::Kind::maxvar:
      break;
    case InitialState::Kind::product: {
      if (st.amplitudes.size() != static_cast<std::size_t>(s.local_dim)) {
        throw SpaceMismatchError("product state needs " + std::to_string(s.local_dim) +
                                 " amplitudes, got " + std::to_string(st.amplitudes.size()));
      }
      break;
    }
    case InitialState::Kind::explicit_amplitudes: {
      const std::size_t probe = probe_space_of(s).dim();
      const std::size_t full = full_space_of(s).dim();
      if (st.amplitudes.size() != probe && st.amplitudes.size() != full) {
        throw SpaceMismatchError("explicit state needs " + std::to_string(probe) +
                                 " (probe) or " + std::to_string(full) +
                                 " (probe+ancilla) amplitudes, got " +
                                 std::to_string(st.amplitudes.size()));
      }
      break;
    }
  }
  if (st.kind == InitialState::Kind::product || st.kind == InitialState::Kind::explicit_amplitudes) {
    double norm2 = 0.0;
    for (cplx c : st.amplitudes) norm2 += std::norm(c);
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
      throw InvalidArgument("state amplitudes must have a finite nonzero norm");
    }
  }
}

Matrix aux_operator(const ProbeSpec& s, const AuxTerm& a, const HilbertSpace& full) {
  if (!(a.t_start < a.t_end)) {
    std::ostringstream os;
    os << "aux interval [" << a.t_start << ", " << a.t_end << "] is empty";
    throw InvalidArgument(os.str());
  }
  if (a.sites.empty()) throw InvalidArgument("aux term needs at least one site");
  if (!a.term) throw InvalidArgument("aux term expression missing");
  Matrix m = eval_operator(*a.term, "aux term");
  std::vector<int> dims;
  for (int site : a.sites) dims.push_back(full.site_dim(site));
  std::size_t want = 1;
  for (int d : dims) want *= static_cast<std::size_t>(d);
  if (static_cast<std::size_t>(m.rows()) != want) {
    throw SpaceMismatchError("aux term is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.rows()) + " but its sites span dimension " +
                             std::to_string(want));
  }
  (void)s;
  try {
    HermitianOp(HilbertSpace(dims), m);
  } catch (const NotHermitianError&) {
    throw NotHermitianError("non-Hermitian aux term");
  }
  return embed(m, dims, a.sites, full);
}

// ---------------------------------------------------------------------------
// Parser

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

template <class F>
void at_position(const Token& where, F&& check) {
  try {
    check();
  } catch (const ParseError&) {
    throw;
  } catch (const DimensionCapError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), where.line, where.column, where.text);
  }
}

std::vector<int> parse_int_list(TokenStream& ts, bool allow_empty) {
  ts.expect("(", "'('");
  std::vector<int> out;
  if (allow_empty && ts.accept(")")) return out;
  out.push_back(static_cast<int>(detail::parse_int(ts)));
  while (ts.accept(",")) out.push_back(static_cast<int>(detail::parse_int(ts)));
  ts.expect(")", "')'");
  return out;
}

std::vector<cplx> parse_amplitudes(TokenStream& ts) {
  ts.expect("(", "'('");
  std::vector<cplx> out;
  do {
    ExprPtr e = detail::parse_expr(ts);
    out.push_back(eval_scalar(*e));
  } while (ts.accept(","));
  ts.expect(")", "')'");
  return out;
}

}  // namespace

ProbeSpec parse_probe_spec(std::string_view text) {
  TokenStream ts(detail::tokenize(text));
  ts.expect("probe", "'probe'");
  ts.expect("{", "'{'");

  ProbeSpec spec;
  std::set<std::string> seen;
  Token size_tok = ts.peek();
  Token coupling_tok;
  Token ancilla_tok;
  Token state_tok;
  std::vector<Token> aux_toks;

  while (!ts.accept("}")) {
    const Token key = ts.peek();
    if (key.kind != TokenKind::identifier) ts.fail("expected a field name or '}'", key);
    static const std::set<std::string> keys = {"n", "d", "k", "coupling", "ancillas", "state",
                                               "aux"};
    if (!keys.count(key.text)) ts.fail("unknown field", key);
    if (key.text != "aux" && !seen.insert(key.text).second) ts.fail("duplicate field", key);
    ts.next();
    ts.expect("=", "'='");

    if (key.text == "n" || key.text == "d" || key.text == "k") {
      const Token v = ts.peek();
      long value = detail::parse_int(ts);
      if (key.text == "n") {
        if (value < 1) ts.fail("n must be >= 1", v);
        spec.n_systems = static_cast<int>(value);
      } else if (key.text == "d") {
        if (value < 2) ts.fail("d must be >= 2", v);
        spec.local_dim = static_cast<int>(value);
      } else {
        if (value < 1) ts.fail("k must be >= 1", v);
        spec.degree = static_cast<int>(value);
      }
      size_tok = key;
    } else if (key.text == "coupling") {
      const Token form = ts.peek();
      if (ts.accept("product")) {
        spec.coupling.form = Coupling::Form::product_local;
      } else if (ts.accept("explicit")) {
        spec.coupling.form = Coupling::Form::explicit_kbody;
      } else {
        ts.fail("expected 'product' or 'explicit'", form);
      }
      ts.expect("(", "'('");
      coupling_tok = ts.peek();
      spec.coupling.expr = detail::parse_expr(ts);
      ts.expect(")", "')'");
    } else if (key.text == "ancillas") {
      ancilla_tok = ts.peek();
      spec.ancillas = parse_int_list(ts, true);
    } else if (key.text == "state") {
      state_tok = ts.peek();
      if (ts.accept("cat")) {
        spec.state.kind = InitialState::Kind::cat;
      } else if (ts.accept("maxvar")) {
        spec.state.kind = InitialState::Kind::maxvar;
      } else if (ts.accept("product")) {
        spec.state.kind = InitialState::Kind::product;
        spec.state.amplitudes = parse_amplitudes(ts);
      } else if (ts.accept("explicit")) {
        spec.state.kind = InitialState::Kind::explicit_amplitudes;
        spec.state.amplitudes = parse_amplitudes(ts);
      } else {
        ts.fail("expected cat, maxvar, product(...) or explicit(...)", state_tok);
      }
    } else {  // aux
      AuxTerm term;
      aux_toks.push_back(ts.peek());
      ts.expect("[", "'['");
      term.t_start = detail::parse_real(ts);
      ts.expect(",", "','");
      term.t_end = detail::parse_real(ts);
      ts.expect("]", "']'");
      term.term = detail::parse_expr(ts);
      ts.expect("@", "'@'");
      term.sites = parse_int_list(ts, false);
      spec.aux.push_back(std::move(term));
    }
    ts.expect(";", "';'");
  }
  if (!ts.at_end()) ts.fail("unexpected input after closing '}'", ts.peek());
  for (const char* required : {"n", "coupling"}) {
    if (!seen.count(required)) {
      ts.fail(std::string("missing required field '") + required + "'", ts.peek());
    }
  }

  at_position(size_tok, [&] { validate_sizes(spec); });
  at_position(ancilla_tok, [&] { validate_ancillas(spec); });
  at_position(coupling_tok, [&] { validate_coupling(spec); });
  if (seen.count("state")) {
    at_position(state_tok, [&] { validate_state(spec); });
  } else {
    at_position(coupling_tok, [&] { validate_state(spec); });
  }
  const HilbertSpace full = full_space_of(spec);
  for (std::size_t j = 0; j < spec.aux.size(); ++j) {
    at_position(aux_toks[j], [&] { aux_operator(spec, spec.aux[j], full); });
  }
  return spec;
}

void validate(const ProbeSpec& spec) {
  validate_sizes(spec);
  validate_ancillas(spec);
  validate_coupling(spec);
  validate_state(spec);
  const HilbertSpace full = full_space_of(spec);
  for (const AuxTerm& a : spec.aux) aux_operator(spec, a, full);
}

ProbeSpec with_systems(const ProbeSpec& spec, int n) {
  ProbeSpec out = spec;
  out.n_systems = n;
  return out;
}

bool structurally_equal(const ProbeSpec& a, const ProbeSpec& b) {
  auto expr_eq = [](const ExprPtr& x, const ExprPtr& y) {
    if (!x || !y) return !x && !y;
    return structurally_equal(*x, *y);
  };
  if (a.n_systems != b.n_systems || a.local_dim != b.local_dim || a.degree != b.degree) {
    return false;
  }
  if (a.coupling.form != b.coupling.form || !expr_eq(a.coupling.expr, b.coupling.expr)) {
    return false;
  }
  if (a.ancillas != b.ancillas) return false;
  if (a.state.kind != b.state.kind || a.state.amplitudes != b.state.amplitudes) return false;
  if (a.aux.size() != b.aux.size()) return false;
  for (std::size_t j = 0; j < a.aux.size(); ++j) {
    const AuxTerm& x = a.aux[j];
    const AuxTerm& y = b.aux[j];
    if (x.t_start != y.t_start || x.t_end != y.t_end || x.sites != y.sites ||
        !expr_eq(x.term, y.term)) {
      return false;
    }
  }
  return true;
}

namespace {

std::string format_complex(cplx c) {
  std::string s = format_double(c.real());
  if (c.imag() > 0.0) s += "+" + format_double(c.imag()) + "*i";
  if (c.imag() < 0.0) s += "-" + format_double(-c.imag()) + "*i";
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t j = 0; j < v.size(); ++j) s += (j ? ", " : "") + std::to_string(v[j]);
  return s;
}

std::string join_amplitudes(const std::vector<cplx>& v) {
  std::string s;
  for (std::size_t j = 0; j < v.size(); ++j) s += (j ? ", " : "") + format_complex(v[j]);
  return s;
}

}  // namespace

std::string to_string(const ProbeSpec& spec) {
  std::ostringstream os;
  os << "probe {\n";
  os << "  n = " << spec.n_systems << ";\n";
  os << "  d = " << spec.local_dim << ";\n";
  os << "  k = " << spec.degree << ";\n";
  os << "  coupling = "
     << (spec.coupling.form == Coupling::Form::product_local ? "product(" : "explicit(")
     << (spec.coupling.expr ? to_string(*spec.coupling.expr) : std::string()) << ");\n";
  if (!spec.ancillas.empty()) os << "  ancillas = (" << join_ints(spec.ancillas) << ");\n";
  os << "  state = ";
  switch (spec.state.kind) {
    case InitialState::Kind::cat:
      os << "cat";
      break;
    case InitialState::Kind::maxvar:
      os << "maxvar";
      break;
    case InitialState::Kind::product:
      os << "product(" << join_amplitudes(spec.state.amplitudes) << ")";
      break;
    case InitialState::Kind::explicit_amplitudes:
      os << "explicit(" << join_amplitudes(spec.state.amplitudes) << ")";
      break;
  }
  os << ";\n";
  for (const AuxTerm& a : spec.aux) {
    os << "  aux = [" << format_double(a.t_start) << ", " << format_double(a.t_end) << "] "
       << to_string(*a.term) << " @ (" << join_ints(a.sites) << ");\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Builders

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return std::round(r);
}

HermitianOp build_h0_separable(const HermitianOp& h_local, int n) {
  if (h_local.space().num_sites() != 1) throw InvalidArgument("h_local must act on one site");
  if (n < 1) throw InvalidArgument("n must be >= 1");
  HilbertSpace space(std::vector<int>(static_cast<std::size_t>(n), h_local.space().site_dim(0)));
  Matrix sum = Matrix::Zero(space.size(), space.size());
  for (int j = 0; j < n; ++j) {
    const int site[] = {j};
    sum += embed(h_local.matrix(), h_local.space().site_dims(), site, space);
  }
  return HermitianOp(space, std::move(sum));
}

HermitianOp build_h0_kbody(const HermitianOp& h_k, int n, int k) {
  if (h_k.space().num_sites() != k) {
    throw InvalidArgument("k-body operator acts on " + std::to_string(h_k.space().num_sites()) +
                          " sites, expected k = " + std::to_string(k));
  }
  if (k < 1 || k > n) throw InvalidArgument("k must satisfy 1 <= k <= n");
  const int d = h_k.space().site_dim(0);
  for (int dim : h_k.space().site_dims()) {
    if (dim != d) throw SpaceMismatchError("k-body operator sites must share one local dimension");
  }
  check_exchange_symmetric(h_k);
  HilbertSpace space(std::vector<int>(static_cast<std::size_t>(n), d));
  Matrix sum = Matrix::Zero(space.size(), space.size());
  for (const auto& subset : subsets(n, k)) {
    sum += embed(h_k.matrix(), h_k.space().site_dims(), subset, space);
  }
  return HermitianOp(space, std::move(sum));
}

HermitianOp tensor_power(const HermitianOp& h_local, int k) {
  if (h_local.space().num_sites() != 1) throw InvalidArgument("h_local must act on one site");
  Matrix m = Matrix::Identity(1, 1);
  for (int j = 0; j < k; ++j) m = kron(m, h_local.matrix());
  return HermitianOp(
      HilbertSpace(std::vector<int>(static_cast<std::size_t>(k), h_local.space().site_dim(0))),
      std::move(m));
}

HermitianOp build_h0_product(const HermitianOp& h_local, int n, int k) {
  if (k == 1) return build_h0_separable(h_local, n);
  return build_h0_kbody(tensor_power(h_local, k), n, k);
}

HermitianOp build_rb_hamiltonian(int n) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  HilbertSpace space = HilbertSpace::qubits(n);
  const Matrix plus = pauli::X() + cplx(0, 1) * pauli::Y();
  const Matrix minus = pauli::X() - cplx(0, 1) * pauli::Y();
  Matrix sp = Matrix::Identity(1, 1);
  Matrix sm = Matrix::Identity(1, 1);
  for (int j = 0; j < n; ++j) {
    sp = kron(sp, plus);
    sm = kron(sm, minus);
  }
  return HermitianOp(space, 0.5 * (sp + sm));
}

std::vector<PauliString> rb_pauli_terms(int n) {
  if (n < 1 || n > 30) throw InvalidArgument("n must be in [1, 30]");
  std::vector<PauliString> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    int ys = std::popcount(mask);
    if (ys % 2) continue;
    PauliString p;
    p.ops.assign(static_cast<std::size_t>(n), 'X');
    for (int j = 0; j < n; ++j) {
      if (mask & (std::uint64_t{1} << (n - 1 - j))) p.ops[static_cast<std::size_t>(j)] = 'Y';
    }
    p.coeff = (ys / 2) % 2 ? -1.0 : 1.0;
    out.push_back(std::move(p));
  }
  return out;
}

bool commute(const PauliString& a, const PauliString& b) {
  if (a.ops.size() != b.ops.size()) throw InvalidArgument("Pauli strings of different length");
  int anti = 0;
  for (std::size_t j = 0; j < a.ops.size(); ++j) {
    if (a.ops[j] != 'I' && b.ops[j] != 'I' && a.ops[j] != b.ops[j]) ++anti;
  }
  return anti % 2 == 0;
}

Matrix to_matrix(const PauliString& p) {
  Matrix m = Matrix::Identity(1, 1);
  for (char c : p.ops) {
    switch (c) {
      case 'I': m = kron(m, pauli::I()); break;
      case 'X': m = kron(m, pauli::X()); break;
      case 'Y': m = kron(m, pauli::Y()); break;
      case 'Z': m = kron(m, pauli::Z()); break;
      default: throw InvalidArgument(std::string("bad Pauli symbol '") + c + "'");
    }
  }
  return p.coeff * m;
}

QuantumState cat_state(const HermitianOp& h_local, int n) {
  if (h_local.space().num_sites() != 1) throw InvalidArgument("h_local must act on one site");
  if (n < 1) throw InvalidArgument("n must be >= 1");
  SpectralDecomp sd = spectral(h_local);
  if (sd.clusters.size() < 2) {
    throw InvalidArgument("cat state needs distinct extremal eigenvalues");
  }
  Vector hi = sd.eigenvectors.col(sd.clusters.back().first);
  Vector lo = sd.eigenvectors.col(sd.clusters.front().first);
  Vector psi = (tensor_power(hi, n) + tensor_power(lo, n)) / std::sqrt(2.0);
  HilbertSpace space(std::vector<int>(static_cast<std::size_t>(n), h_local.space().site_dim(0)));
  return QuantumState::pure(space, psi, 1e-10);
}

Probe build_probe(const ProbeSpec& spec) {
  validate(spec);
  HilbertSpace probe = probe_space_of(spec);
  HilbertSpace full = full_space_of(spec);
  HermitianOp unit = unit_operator(spec);
  HermitianOp h0_probe = spec.coupling.form == Coupling::Form::product_local
                             ? build_h0_product(unit, spec.n_systems, spec.degree)
                             : build_h0_kbody(unit, spec.n_systems, spec.degree);
  const std::vector<int> probe_sites = iota_sites(0, spec.n_systems);
  HermitianOp h0 = embed(h0_probe, probe_sites, full);

  std::vector<Segment> terms;
  for (const AuxTerm& a : spec.aux) {
    terms.push_back(Segment{a.t_start, a.t_end, HermitianOp(full, aux_operator(spec, a, full))});
  }
  Schedule aux = Schedule::from_terms(full, terms);

  const std::size_t anc_dim = full.dim() / probe.dim();
  Vector probe_vec;
  Vector full_vec;
  const auto& st = spec.state;
  switch (st.kind) {
    case InitialState::Kind::cat:
      probe_vec = cat_state(unit, spec.n_systems).vector();
      break;
    case InitialState::Kind::maxvar:
      probe_vec = max_variance_state(h0_probe).vector();
      break;
    case InitialState::Kind::product: {
      Vector v = Eigen::Map<const Vector>(st.amplitudes.data(),
                                          static_cast<Eigen::Index>(st.amplitudes.size()));
      probe_vec = tensor_power(Vector(v.normalized()), spec.n_systems);
      break;
    }
    case InitialState::Kind::explicit_amplitudes: {
      Vector v = Eigen::Map<const Vector>(st.amplitudes.data(),
                                          static_cast<Eigen::Index>(st.amplitudes.size()));
      v.normalize();
      if (static_cast<std::size_t>(v.size()) == full.dim()) {
        full_vec = v;
      } else {
        probe_vec = v;
      }
      break;
    }
  }
  if (full_vec.size() == 0) {
    Vector anc0 = Vector::Zero(static_cast<Eigen::Index>(anc_dim));
    anc0(0) = 1.0;
    full_vec = kron_vec(probe_vec, anc0);
  }
  QuantumState initial = QuantumState::pure(full, full_vec, 1e-10);
  return Probe{spec, probe, full, unit, h0_probe, h0, aux, initial};
}

CouplingSummary coupling_summary(const Probe& probe) {
  const ProbeSpec& spec = probe.spec;
  CouplingSummary s{probe.h0_probe, 0.0, 0.0, 0.0, 0.0, std::nullopt, std::nullopt};
  s.seminorm_h0 = seminorm(probe.h0_probe);
  const bool product = spec.coupling.form == Coupling::Form::product_local;
  if (product) {
    RealVector ev = eigenvalues(probe.unit);
    s.lambda_min = ev(0);
    s.lambda_max = ev(ev.size() - 1);
    s.seminorm_unit = seminorm(tensor_power(probe.unit, spec.degree));
  } else {
    s.seminorm_unit = seminorm(probe.unit);
  }
  s.binomial_nk = binomial(spec.n_systems, spec.degree);
  s.seminorm_bound = s.binomial_nk * s.seminorm_unit;
  return s;
}

CouplingSummary coupling_summary(const ProbeSpec& spec) { return coupling_summary(build_probe(spec)); }

}  // namespace qest
