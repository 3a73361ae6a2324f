#pragma once

// Sparse polynomials over exact rationals in the formal symbols
// p, p', p'', ... and q, q', q'', ... together with the total derivation
// that maps each symbol to the next-order one.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace liftode {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class Base : std::uint8_t { P = 0, Q = 1 };

/// The formal symbol base^(order): (P,0) = p, (P,1) = p', (Q,2) = q''.
/// Ordered by base first (every P before every Q), then by order.
struct DiffSymbol {
  Base base = Base::P;
  unsigned order = 0;

  constexpr DiffSymbol derived() const { return {base, order + 1}; }

  friend constexpr auto operator<=>(const DiffSymbol&, const DiffSymbol&) = default;
};

inline constexpr DiffSymbol p_sym(unsigned order = 0) { return {Base::P, order}; }
inline constexpr DiffSymbol q_sym(unsigned order = 0) { return {Base::Q, order}; }

/// Plain-grammar spelling: p, p', ..., p'''' and p[k] beyond order 4.
std::string to_string(DiffSymbol s);

/// Power product of symbols. Factors are kept sorted by symbol with
/// strictly positive exponents; the empty product is the monomial 1.
class Monomial {
 public:
  using Factor = std::pair<DiffSymbol, unsigned>;

  Monomial() = default;
  explicit Monomial(DiffSymbol s, unsigned exponent = 1);

  /// Sorts, merges repeated symbols and drops zero exponents.
  static Monomial from_factors(std::vector<Factor> factors);

  std::span<const Factor> factors() const noexcept { return factors_; }
  unsigned degree() const noexcept { return degree_; }
  bool is_one() const noexcept { return factors_.empty(); }
  unsigned exponent(DiffSymbol s) const noexcept;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) noexcept {
    return a.factors_ == b.factors_;
  }
  /// Graded lexicographic: total degree first, then the exponent vectors
  /// compared with the smallest DiffSymbol most significant.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) noexcept;

 private:
  std::vector<Factor> factors_;
  unsigned degree_ = 0;
};

enum class Style { plain, latex, json };

/// Polynomial in the DiffSymbols with Rational coefficients. Never stores a
/// zero coefficient, so structural equality is mathematical equality.
/// Terms iterate in descending monomial order.
class DiffPoly {
 public:
  using TermMap = std::map<Monomial, Rational, std::greater<>>;

  DiffPoly() = default;
  explicit DiffPoly(int constant) : DiffPoly(Rational(constant)) {}
  explicit DiffPoly(const Rational& constant);
  explicit DiffPoly(DiffSymbol s);
  DiffPoly(const Rational& coefficient, Monomial monomial);

  static DiffPoly p(unsigned order = 0) { return DiffPoly(p_sym(order)); }
  static DiffPoly q(unsigned order = 0) { return DiffPoly(q_sym(order)); }

  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// The value if the polynomial is a constant (including 0).
  std::optional<Rational> constant_value() const;
  Rational coefficient(const Monomial& m) const;

  std::set<DiffSymbol> symbols() const;
  /// Highest derivative order of any symbol present; nullopt for constants.
  std::optional<unsigned> max_order() const;

  DiffPoly operator-() const;
  DiffPoly& operator+=(const DiffPoly& other);
  DiffPoly& operator-=(const DiffPoly& other);
  DiffPoly& operator*=(const DiffPoly& other);
  DiffPoly& operator*=(const Rational& scalar);
  /// Exact division by a nonzero constant; throws std::domain_error on zero.
  DiffPoly& operator/=(const Rational& scalar);

  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator*(DiffPoly a, const Rational& s) { return a *= s; }
  friend DiffPoly operator*(const Rational& s, DiffPoly a) { return a *= s; }
  friend DiffPoly operator/(DiffPoly a, const Rational& s) { return a /= s; }
  friend bool operator==(const DiffPoly&, const DiffPoly&) = default;

 private:
  void add_term(const Monomial& m, const Rational& c);

  TermMap terms_;
};

/// Total derivative: linear, Leibniz, (base, k) -> (base, k+1).
DiffPoly derive(const DiffPoly& a);

/// Replaces every symbol with the given base by zero.
DiffPoly drop_base(const DiffPoly& a, Base base);

/// Parses the plain fixture grammar: integers, p/q with up to four
/// apostrophes (or p[k] for any order), + - * ^ and parentheses, with
/// division allowed only by an integer literal. Throws ParseError.
DiffPoly parse_diffpoly(std::string_view text);

/// Deterministic rendering in canonical monomial order. The plain style
/// parses back to the same polynomial.
std::string format(const DiffPoly& a, Style style = Style::plain);

/// Inverse of format(a, Style::json).
DiffPoly parse_diffpoly_json(std::string_view text);

using Assignment = std::map<DiffSymbol, double>;

/// Floating-point evaluation. Throws MissingSymbolError naming the first
/// symbol of `a` that `values` does not cover.
double evaluate(const DiffPoly& a, const Assignment& values);

std::string to_string(const Rational& r);

}  // namespace liftode
