#pragma once

// Operator expressions over qubit Paulis, real diagonal qudit operators and
// complex scalars, as used in probe specifications.
//
//   expr   := term (("+"|"-") term)*
//   term   := factor ("*" factor)*
//   factor := I | X | Y | Z | diag(real, ...) | number | i
//           | kron(expr, expr) | (expr) | -factor

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qest/opalg.hpp"

namespace qest {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { identity, pauli_x, pauli_y, pauli_z, diag, number, imag_unit, neg, add, sub, mul, kron };

  Kind kind = Kind::number;
  double number = 0.0;        // Kind::number
  std::vector<double> diag;   // Kind::diag
  ExprPtr lhs;                // neg (operand), add, sub, mul, kron
  ExprPtr rhs;
  // Source position; not part of structural equality.
  int line = 0;
  int column = 0;
};

bool structurally_equal(const Expr& a, const Expr& b);

/// Either a complex scalar or a square matrix.
struct ExprValue {
  bool is_scalar = true;
  cplx scalar{0.0, 0.0};
  Matrix matrix;

  Eigen::Index dim() const { return is_scalar ? 0 : matrix.rows(); }
  /// Scalars are promoted to scalar * identity of the requested size.
  Matrix as_matrix(Eigen::Index dim) const;
};

/// Evaluates the tree. Adding a scalar to a matrix, or matrices of different
/// sizes, raises ParseError at the offending node.
ExprValue evaluate(const Expr& e);

/// Canonical text form; parse_expr(to_string(e)) is structurally equal to e.
std::string to_string(const Expr& e);

ExprPtr parse_expr(std::string_view text);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

namespace detail {

enum class TokenKind { identifier, number, punct, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  double value = 0.0;
  int line = 1;
  int column = 1;
};

/// Tokenizer shared with the probe-spec parser. '#' starts a comment.
std::vector<Token> tokenize(std::string_view text);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool accept(std::string_view punct_or_word);
  const Token& expect(std::string_view punct_or_word, std::string_view what);
  [[noreturn]] void fail(const std::string& message, const Token& at) const;
  bool at_end() const { return peek().kind == TokenKind::end; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

ExprPtr parse_expr(TokenStream& ts);
/// ["-"] number
double parse_real(TokenStream& ts);
long parse_int(TokenStream& ts);

}  // namespace detail
}  // namespace qest
