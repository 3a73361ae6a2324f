#pragma once

// Concrete coefficient functions p(x), q(x): a small immutable expression
// tree with a parser, an evaluator and symbolic differentiation.
//
// Grammar:
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' int)?
//   atom  := number | 'x' | func '(' expr ')' | '(' expr ')'
//   func  := 'sin' | 'cos' | 'exp' | 'ln'
// `int` may carry a sign; `number` is a decimal literal.

#include <memory>
#include <string>
#include <string_view>

namespace liftode {

class Expr {
 public:
  enum class Kind { number, variable, negate, add, subtract, multiply, divide, power, sin, cos, exp, ln };

  /// The literal 0.
  Expr();

  static Expr constant(double value);
  static Expr x();
  static Expr pow(Expr base, int exponent);
  /// Kind must be one of sin, cos, exp, ln.
  static Expr apply(Kind function, Expr argument);

  // These fold literal arithmetic and the identities 0+e, 1*e, 0*e, e^1, e^0.
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  Kind kind() const noexcept;
  bool is_number() const noexcept { return kind() == Kind::number; }
  /// Literal value; only meaningful for Kind::number.
  double value() const noexcept;
  /// Only meaningful for Kind::power.
  int exponent() const noexcept;
  /// Operand for unary nodes, left operand for binary nodes.
  const Expr& lhs() const;
  const Expr& rhs() const;

  /// Node count, as a crude measure of tree growth under differentiation.
  std::size_t size() const;

 private:
  struct Node;
  struct Parser;
  friend Expr parse_expr(std::string_view text);

  explicit Expr(std::shared_ptr<const Node> node);
  static Expr make(Kind kind, Expr a, Expr b, int exponent = 0);

  std::shared_ptr<const Node> node_;
};

/// Throws ParseError with the byte offset and the set of expected tokens.
Expr parse_expr(std::string_view text);

Expr diff_expr(const Expr& e);
Expr diff_expr(const Expr& e, unsigned times);

/// Throws DomainError (ln of a non-positive value, division by zero,
/// negative power of zero) naming the offending sub-expression.
double eval_expr(const Expr& e, double x);

/// Fully parenthesized text that parse_expr reads back to an equivalent
/// tree; numbers are printed exactly.
std::string format_expr(const Expr& e);

}  // namespace liftode
