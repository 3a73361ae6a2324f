#include "liftode/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "liftode/errors.hpp"

namespace liftode {

struct Expr::Node {
  Kind kind;
  double value = 0.0;
  int exponent = 0;
  Expr a;
  Expr b;
};

namespace {

bool is_function(Expr::Kind k) {
  return k == Expr::Kind::sin || k == Expr::Kind::cos || k == Expr::Kind::exp || k == Expr::Kind::ln;
}

const char* function_name(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::sin: return "sin";
    case Expr::Kind::cos: return "cos";
    case Expr::Kind::exp: return "exp";
    case Expr::Kind::ln: return "ln";
    default: return "?";
  }
}

bool is_literal(const Expr& e, double v) { return e.is_number() && e.value() == v; }

}  // namespace

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::make(Kind kind, Expr a, Expr b, int exponent) {
  return Expr(std::make_shared<const Node>(Node{kind, 0.0, exponent, std::move(a), std::move(b)}));
}

Expr Expr::constant(double value) {
  return Expr(std::make_shared<const Node>(Node{Kind::number, value, 0, Expr(nullptr), Expr(nullptr)}));
}

Expr Expr::x() { return make(Kind::variable, Expr(nullptr), Expr(nullptr)); }

Expr Expr::pow(Expr base, int exponent) {
  if (exponent == 1) return base;
  if (exponent == 0) return constant(1.0);
  if (base.is_number() && (base.value() != 0.0 || exponent > 0)) {
    return constant(std::pow(base.value(), exponent));
  }
  return make(Kind::power, std::move(base), Expr(nullptr), exponent);
}

Expr Expr::apply(Kind function, Expr argument) {
  if (!is_function(function)) throw std::invalid_argument("Expr::apply needs sin, cos, exp or ln");
  return make(function, std::move(argument), Expr(nullptr));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return Expr::constant(a.value() + b.value());
  if (is_literal(a, 0.0)) return b;
  if (is_literal(b, 0.0)) return a;
  return Expr::make(Expr::Kind::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return Expr::constant(a.value() - b.value());
  if (is_literal(b, 0.0)) return a;
  if (is_literal(a, 0.0)) return -b;
  return Expr::make(Expr::Kind::subtract, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number()) return Expr::constant(a.value() * b.value());
  if (is_literal(a, 0.0) || is_literal(b, 0.0)) return Expr::constant(0.0);
  if (is_literal(a, 1.0)) return b;
  if (is_literal(b, 1.0)) return a;
  return Expr::make(Expr::Kind::multiply, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_number() && b.is_number() && b.value() != 0.0) return Expr::constant(a.value() / b.value());
  if (is_literal(b, 1.0)) return a;
  return Expr::make(Expr::Kind::divide, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_number()) return Expr::constant(-a.value());
  if (a.kind() == Expr::Kind::negate) return a.lhs();
  return Expr::make(Expr::Kind::negate, a, Expr(nullptr));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const noexcept { return node_->value; }
int Expr::exponent() const noexcept { return node_->exponent; }

const Expr& Expr::lhs() const {
  if (!node_->a.node_) throw std::logic_error("expression node has no operand");
  return node_->a;
}

const Expr& Expr::rhs() const {
  if (!node_->b.node_) throw std::logic_error("expression node has no right operand");
  return node_->b;
}

std::size_t Expr::size() const {
  std::size_t n = 1;
  if (node_->a.node_) n += node_->a.size();
  if (node_->b.node_) n += node_->b.size();
  return n;
}

// Parsing

namespace {

const std::vector<std::string> kAtomStart = {"number", "'x'", "function", "'('", "'-'"};

}  // namespace

// Builds the tree exactly as written, without folding.
struct Expr::Parser {
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ < text_.size()) {
      fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"},
           std::string("unexpected character '") + text_[pos_] + "'");
    }
    return e;
  }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
    throw ParseError(pos_, std::move(expected), detail);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool digit_at(std::size_t i) const {
    return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
  }

  Expr expr() {
    Expr acc = term();
    for (;;) {
      if (accept('+')) {
        acc = combine(Expr::Kind::add, acc, term());
      } else if (accept('-')) {
        acc = combine(Expr::Kind::subtract, acc, term());
      } else {
        return acc;
      }
    }
  }

  Expr term() {
    Expr acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = combine(Expr::Kind::multiply, acc, unary());
      } else if (accept('/')) {
        acc = combine(Expr::Kind::divide, acc, unary());
      } else {
        return acc;
      }
    }
  }

  static Expr combine(Kind kind, const Expr& a, const Expr& b) { return make(kind, a, b); }

  Expr unary() {
    if (accept('-')) return negate(unary());
    return power();
  }

  static Expr negate(const Expr& a) { return make(Kind::negate, a, Expr(nullptr)); }

  Expr power() {
    Expr base = atom();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    if (!digit_at(pos_)) fail({"integer exponent"}, "missing integer exponent");
    while (digit_at(pos_)) ++pos_;
    long long n = 0;
    const char* first = text_.data() + start + (text_[start] == '+' ? 1 : 0);
    const auto [ptr, ec] = std::from_chars(first, text_.data() + pos_, n);
    if (ec != std::errc() || n > std::numeric_limits<int>::max() || n < std::numeric_limits<int>::min()) {
      pos_ = start;
      fail({"integer exponent"}, "exponent out of range");
    }
    return raw_power(base, static_cast<int>(n));
  }

  static Expr raw_power(const Expr& base, int n) { return make(Kind::power, base, Expr(nullptr), n); }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail(kAtomStart, "unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!accept(')')) fail({"')'"}, "unbalanced parenthesis");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const auto name = text_.substr(start, pos_ - start);
      if (name == "x") return Expr::x();
      Kind fn;
      if (name == "sin") {
        fn = Kind::sin;
      } else if (name == "cos") {
        fn = Kind::cos;
      } else if (name == "exp") {
        fn = Kind::exp;
      } else if (name == "ln") {
        fn = Kind::ln;
      } else {
        pos_ = start;
        fail({"'x'", "'sin'", "'cos'", "'exp'", "'ln'"}, "unknown identifier '" + std::string(name) + "'");
      }
      if (!accept('(')) fail({"'('"}, "function name must be followed by '('");
      Expr arg = expr();
      if (!accept(')')) fail({"')'"}, "unbalanced parenthesis");
      return Expr::apply(fn, arg);
    }
    fail(kAtomStart, std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (digit_at(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      if (!digit_at(pos_)) fail({"digit"}, "incomplete decimal literal");
      while (digit_at(pos_)) ++pos_;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v, std::chars_format::fixed);
    if (ec != std::errc()) {
      pos_ = start;
      fail({"number"}, "numeric literal out of range");
    }
    return Expr::constant(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

Expr parse_expr(std::string_view text) { return Expr::Parser(text).parse(); }

// Differentiation

Expr diff_expr(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::number: return Expr::constant(0.0);
    case K::variable: return Expr::constant(1.0);
    case K::negate: return -diff_expr(e.lhs());
    case K::add: return diff_expr(e.lhs()) + diff_expr(e.rhs());
    case K::subtract: return diff_expr(e.lhs()) - diff_expr(e.rhs());
    case K::multiply: return diff_expr(e.lhs()) * e.rhs() + e.lhs() * diff_expr(e.rhs());
    case K::divide: {
      const Expr& a = e.lhs();
      const Expr& b = e.rhs();
      return (diff_expr(a) * b - a * diff_expr(b)) / Expr::pow(b, 2);
    }
    case K::power: {
      const int n = e.exponent();
      return Expr::constant(n) * Expr::pow(e.lhs(), n - 1) * diff_expr(e.lhs());
    }
    case K::sin: return Expr::apply(K::cos, e.lhs()) * diff_expr(e.lhs());
    case K::cos: return -Expr::apply(K::sin, e.lhs()) * diff_expr(e.lhs());
    case K::exp: return e * diff_expr(e.lhs());
    case K::ln: return diff_expr(e.lhs()) / e.lhs();
  }
  throw std::logic_error("unknown expression node");
}

Expr diff_expr(const Expr& e, unsigned times) {
  Expr out = e;
  for (unsigned i = 0; i < times; ++i) out = diff_expr(out);
  return out;
}

// Evaluation

double eval_expr(const Expr& e, double x) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::number: return e.value();
    case K::variable: return x;
    case K::negate: return -eval_expr(e.lhs(), x);
    case K::add: return eval_expr(e.lhs(), x) + eval_expr(e.rhs(), x);
    case K::subtract: return eval_expr(e.lhs(), x) - eval_expr(e.rhs(), x);
    case K::multiply: return eval_expr(e.lhs(), x) * eval_expr(e.rhs(), x);
    case K::divide: {
      const double num = eval_expr(e.lhs(), x);
      const double den = eval_expr(e.rhs(), x);
      if (den == 0.0) throw DomainError(format_expr(e), x, "division by zero");
      return num / den;
    }
    case K::power: {
      const double base = eval_expr(e.lhs(), x);
      if (base == 0.0 && e.exponent() < 0) throw DomainError(format_expr(e), x, "negative power of zero");
      return std::pow(base, e.exponent());
    }
    case K::sin: return std::sin(eval_expr(e.lhs(), x));
    case K::cos: return std::cos(eval_expr(e.lhs(), x));
    case K::exp: return std::exp(eval_expr(e.lhs(), x));
    case K::ln: {
      const double arg = eval_expr(e.lhs(), x);
      if (!(arg > 0.0)) throw DomainError(format_expr(e), x, "logarithm of a non-positive value");
      return std::log(arg);
    }
  }
  throw std::logic_error("unknown expression node");
}

// Formatting

namespace {

int precedence(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::add:
    case K::subtract: return 1;
    case K::multiply:
    case K::divide: return 2;
    case K::negate: return 3;
    case K::power: return 4;
    case K::number: return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 5;
    default: return 5;
  }
}

std::string format_number(double v) {
  if (!std::isfinite(v)) throw std::domain_error("cannot format a non-finite literal");
  char buf[400];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::fabs(v), std::chars_format::fixed);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  std::string out(buf, ptr);
  return std::signbit(v) ? "-" + out : out;
}

std::string wrap(const Expr& e, int min_prec) {
  std::string s = format_expr(e);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string format_expr(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::number: return format_number(e.value());
    case K::variable: return "x";
    case K::negate: return "-" + wrap(e.lhs(), 3);
    case K::add: return wrap(e.lhs(), 1) + " + " + wrap(e.rhs(), 2);
    case K::subtract: return wrap(e.lhs(), 1) + " - " + wrap(e.rhs(), 2);
    case K::multiply: return wrap(e.lhs(), 2) + "*" + wrap(e.rhs(), 3);
    case K::divide: return wrap(e.lhs(), 2) + "/" + wrap(e.rhs(), 3);
    case K::power: return wrap(e.lhs(), 5) + "^" + std::to_string(e.exponent());
    case K::sin:
    case K::cos:
    case K::exp:
    case K::ln: return std::string(function_name(e.kind())) + "(" + format_expr(e.lhs()) + ")";
  }
  throw std::logic_error("unknown expression node");
}

}  // namespace liftode
