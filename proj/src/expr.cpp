#include "qest/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace qest {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("failed to format floating-point value");
  return std::string(buf, ptr);
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::number:
      return a.number == b.number;
    case Expr::Kind::diag:
      return a.diag == b.diag;
    case Expr::Kind::neg:
      return structurally_equal(*a.lhs, *b.lhs);
    case Expr::Kind::add:
    case Expr::Kind::sub:
    case Expr::Kind::mul:
    case Expr::Kind::kron:
      return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    default:
      return true;
  }
}

Matrix ExprValue::as_matrix(Eigen::Index dim) const {
  if (!is_scalar) return matrix;
  return Matrix::Identity(dim, dim) * scalar;
}

namespace {

[[noreturn]] void eval_fail(const Expr& at, const std::string& message) {
  throw ParseError(message, at.line, at.column, "");
}

ExprValue matrix_value(Matrix m) {
  ExprValue v;
  v.is_scalar = false;
  v.matrix = std::move(m);
  return v;
}

ExprValue scalar_value(cplx s) {
  ExprValue v;
  v.scalar = s;
  return v;
}

ExprValue add_values(const Expr& at, const ExprValue& a, const ExprValue& b, double sign) {
  if (a.is_scalar && b.is_scalar) return scalar_value(a.scalar + sign * b.scalar);
  if (a.is_scalar != b.is_scalar) {
    eval_fail(at, "cannot add a scalar and a " + std::to_string(a.is_scalar ? b.dim() : a.dim()) +
                      "-dimensional operator");
  }
  if (a.dim() != b.dim()) {
    eval_fail(at, "dimension mismatch in sum: " + std::to_string(a.dim()) + " vs " +
                      std::to_string(b.dim()));
  }
  return matrix_value(a.matrix + sign * b.matrix);
}

}  // namespace

ExprValue evaluate(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::identity:
      return matrix_value(pauli::I());
    case K::pauli_x:
      return matrix_value(pauli::X());
    case K::pauli_y:
      return matrix_value(pauli::Y());
    case K::pauli_z:
      return matrix_value(pauli::Z());
    case K::diag: {
      if (e.diag.size() < 2) eval_fail(e, "diag needs at least two entries");
      Matrix m = Matrix::Zero(static_cast<Eigen::Index>(e.diag.size()),
                              static_cast<Eigen::Index>(e.diag.size()));
      for (std::size_t j = 0; j < e.diag.size(); ++j) {
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = e.diag[j];
      }
      return matrix_value(std::move(m));
    }
    case K::number:
      return scalar_value(cplx(e.number, 0.0));
    case K::imag_unit:
      return scalar_value(cplx(0.0, 1.0));
    case K::neg: {
      ExprValue v = evaluate(*e.lhs);
      if (v.is_scalar) return scalar_value(-v.scalar);
      return matrix_value(-v.matrix);
    }
    case K::add:
      return add_values(e, evaluate(*e.lhs), evaluate(*e.rhs), 1.0);
    case K::sub:
      return add_values(e, evaluate(*e.lhs), evaluate(*e.rhs), -1.0);
    case K::mul: {
      ExprValue a = evaluate(*e.lhs);
      ExprValue b = evaluate(*e.rhs);
      if (a.is_scalar && b.is_scalar) return scalar_value(a.scalar * b.scalar);
      if (a.is_scalar) return matrix_value(a.scalar * b.matrix);
      if (b.is_scalar) return matrix_value(a.matrix * b.scalar);
      if (a.dim() != b.dim()) {
        eval_fail(e, "dimension mismatch in product: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
      }
      return matrix_value(a.matrix * b.matrix);
    }
    case K::kron: {
      ExprValue a = evaluate(*e.lhs);
      ExprValue b = evaluate(*e.rhs);
      if (a.is_scalar || b.is_scalar) eval_fail(e, "kron arguments must be operators, not scalars");
      return matrix_value(kron(a.matrix, b.matrix));
    }
  }
  eval_fail(e, "unknown expression node");
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool is_sum(const Expr& e) { return e.kind == Expr::Kind::add || e.kind == Expr::Kind::sub; }

std::string print(const Expr& e);

std::string wrap_if(bool cond, const std::string& s) { return cond ? "(" + s + ")" : s; }

std::string print(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::identity:
      return "I";
    case K::pauli_x:
      return "X";
    case K::pauli_y:
      return "Y";
    case K::pauli_z:
      return "Z";
    case K::imag_unit:
      return "i";
    case K::number:
      return format_double(e.number);
    case K::diag: {
      std::string s = "diag(";
      for (std::size_t j = 0; j < e.diag.size(); ++j) {
        if (j) s += ", ";
        s += format_double(e.diag[j]);
      }
      return s + ")";
    }
    case K::neg:
      return "-" + wrap_if(is_sum(*e.lhs) || e.lhs->kind == K::mul, print(*e.lhs));
    case K::add:
      return print(*e.lhs) + " + " + wrap_if(is_sum(*e.rhs), print(*e.rhs));
    case K::sub:
      return print(*e.lhs) + " - " + wrap_if(is_sum(*e.rhs), print(*e.rhs));
    case K::mul:
      return wrap_if(is_sum(*e.lhs), print(*e.lhs)) + "*" +
             wrap_if(is_sum(*e.rhs) || e.rhs->kind == K::mul, print(*e.rhs));
    case K::kron:
      return "kron(" + print(*e.lhs) + ", " + print(*e.rhs) + ")";
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print(e); }

// ---------------------------------------------------------------------------
// Lexing

namespace detail {

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      tok.kind = TokenKind::identifier;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t j = i;
      auto digits = [&] {
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      };
      digits();
      if (j < text.size() && text[j] == '.') {
        ++j;
        digits();
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          j = k;
          digits();
        } else {
          throw ParseError("malformed exponent in number", line, col,
                           std::string(text.substr(i, k - i)));
        }
      }
      tok.kind = TokenKind::number;
      tok.text = std::string(text.substr(i, j - i));
      const char* first = text.data() + i;
      auto [ptr, ec] = std::from_chars(first, text.data() + j, tok.value);
      if (ec != std::errc() || ptr != text.data() + j) {
        throw ParseError("invalid number", line, col, tok.text);
      }
      advance(j - i);
    } else if (std::string_view("{}()[],;=+-*@").find(c) != std::string_view::npos) {
      tok.kind = TokenKind::punct;
      tok.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError("unexpected character", line, col, std::string(1, c));
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = TokenKind::end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
  return tokens_[idx];
}

const Token& TokenStream::next() {
  const Token& t = tokens_[pos_];
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool TokenStream::accept(std::string_view s) {
  const Token& t = peek();
  if ((t.kind == TokenKind::punct || t.kind == TokenKind::identifier) && t.text == s) {
    next();
    return true;
  }
  return false;
}

const Token& TokenStream::expect(std::string_view s, std::string_view what) {
  const Token& t = peek();
  if ((t.kind == TokenKind::punct || t.kind == TokenKind::identifier) && t.text == s) {
    return next();
  }
  fail("expected " + std::string(what), t);
}

void TokenStream::fail(const std::string& message, const Token& at) const {
  throw ParseError(message, at.line, at.column,
                   at.kind == TokenKind::end ? std::string("end of input") : at.text);
}

namespace {

ExprPtr make(Expr::Kind kind, const Token& at, ExprPtr lhs = nullptr, ExprPtr rhs = nullptr) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  e->line = at.line;
  e->column = at.column;
  return e;
}

ExprPtr parse_factor(TokenStream& ts);

ExprPtr parse_term(TokenStream& ts) {
  ExprPtr lhs = parse_factor(ts);
  while (ts.peek().kind == TokenKind::punct && ts.peek().text == "*") {
    const Token& op = ts.next();
    ExprPtr rhs = parse_factor(ts);
    lhs = make(Expr::Kind::mul, op, lhs, rhs);
  }
  return lhs;
}

ExprPtr parse_factor(TokenStream& ts) {
  const Token& t = ts.peek();
  if (t.kind == TokenKind::number) {
    ts.next();
    auto e = make(Expr::Kind::number, t);
    std::const_pointer_cast<Expr>(e)->number = t.value;
    return e;
  }
  if (t.kind == TokenKind::punct) {
    if (t.text == "(") {
      ts.next();
      ExprPtr inner = parse_expr(ts);
      ts.expect(")", "')'");
      return inner;
    }
    if (t.text == "-") {
      const Token& op = ts.next();
      return make(Expr::Kind::neg, op, parse_factor(ts));
    }
    ts.fail("expected an operator expression", t);
  }
  if (t.kind == TokenKind::identifier) {
    const Token& id = ts.next();
    if (id.text == "I") return make(Expr::Kind::identity, id);
    if (id.text == "X") return make(Expr::Kind::pauli_x, id);
    if (id.text == "Y") return make(Expr::Kind::pauli_y, id);
    if (id.text == "Z") return make(Expr::Kind::pauli_z, id);
    if (id.text == "i") return make(Expr::Kind::imag_unit, id);
    if (id.text == "diag") {
      ts.expect("(", "'(' after diag");
      auto e = std::const_pointer_cast<Expr>(make(Expr::Kind::diag, id));
      e->diag.push_back(parse_real(ts));
      while (ts.accept(",")) e->diag.push_back(parse_real(ts));
      ts.expect(")", "')' closing diag");
      return e;
    }
    if (id.text == "kron") {
      ts.expect("(", "'(' after kron");
      ExprPtr a = parse_expr(ts);
      ts.expect(",", "',' between kron arguments");
      ExprPtr b = parse_expr(ts);
      ts.expect(")", "')' closing kron");
      return make(Expr::Kind::kron, id, a, b);
    }
    ts.fail("unknown operator symbol", id);
  }
  ts.fail("expected an operator expression", t);
}

}  // namespace

ExprPtr parse_expr(TokenStream& ts) {
  ExprPtr lhs = parse_term(ts);
  while (ts.peek().kind == TokenKind::punct && (ts.peek().text == "+" || ts.peek().text == "-")) {
    const Token& op = ts.next();
    ExprPtr rhs = parse_term(ts);
    lhs = make(op.text == "+" ? Expr::Kind::add : Expr::Kind::sub, op, lhs, rhs);
  }
  return lhs;
}

double parse_real(TokenStream& ts) {
  bool negative = ts.accept("-");
  const Token& t = ts.peek();
  if (t.kind != TokenKind::number) ts.fail("expected a real number", t);
  ts.next();
  return negative ? -t.value : t.value;
}

long parse_int(TokenStream& ts) {
  const Token& t = ts.peek();
  if (t.kind != TokenKind::number || t.text.find_first_not_of("0123456789") != std::string::npos) {
    ts.fail("expected a non-negative integer", t);
  }
  ts.next();
  if (t.text.size() > 9) ts.fail("integer too large", t);
  return std::stol(t.text);
}

}  // namespace detail

ExprPtr parse_expr(std::string_view text) {
  detail::TokenStream ts(detail::tokenize(text));
  ExprPtr e = detail::parse_expr(ts);
  if (!ts.at_end()) ts.fail("unexpected trailing input", ts.peek());
  return e;
}

}  // namespace qest
