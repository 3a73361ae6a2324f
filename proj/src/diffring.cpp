#include "liftode/diffring.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "json_io.hpp"
#include "liftode/errors.hpp"

namespace liftode {

namespace {

constexpr unsigned kMaxPrimes = 4;

char base_letter(Base b) { return b == Base::P ? 'p' : 'q'; }

std::string roman(unsigned n) {
  static constexpr std::pair<unsigned, const char*> table[] = {
      {1000, "m"}, {900, "cm"}, {500, "d"}, {400, "cd"}, {100, "c"}, {90, "xc"}, {50, "l"},
      {40, "xl"},  {10, "x"},   {9, "ix"},  {5, "v"},    {4, "iv"},  {1, "i"}};
  std::string out;
  for (const auto& [value, digits] : table) {
    while (n >= value) {
      out += digits;
      n -= value;
    }
  }
  return out;
}

std::string latex_symbol(DiffSymbol s) {
  std::string out(1, base_letter(s.base));
  if (s.order == 0) return out;
  if (s.order < 4) {
    out += "^{";
    for (unsigned i = 0; i < s.order; ++i) out += "\\prime";
    out += '}';
    return out;
  }
  return out + "^{(" + roman(s.order) + ")}";
}

std::string exponent_suffix(unsigned e) {
  if (e < 10) return "^" + std::to_string(e);
  return "^{" + std::to_string(e) + "}";
}

std::string format_monomial(const Monomial& m, Style style) {
  std::string out;
  for (const auto& [sym, e] : m.factors()) {
    if (style == Style::plain) {
      if (!out.empty()) out += '*';
      out += to_string(sym);
      if (e > 1) out += '^' + std::to_string(e);
    } else {
      const std::string s = latex_symbol(sym);
      if (e == 1) {
        out += s;
      } else if (sym.order == 0) {
        out += s + exponent_suffix(e);
      } else {
        out += "{" + s + "}" + exponent_suffix(e);
      }
    }
  }
  return out;
}

std::string latex_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return "\\frac{" + numerator(r).str() + "}{" + denominator(r).str() + "}";
}

double ipow(double base, unsigned e) {
  double result = 1.0;
  while (e > 0) {
    if (e & 1U) result *= base;
    base *= base;
    e >>= 1U;
  }
  return result;
}

class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : text_(text) {}

  DiffPoly parse() {
    DiffPoly result = expr();
    skip_ws();
    if (pos_ < text_.size()) {
      fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"},
           std::string("unexpected character '") + text_[pos_] + "'");
    }
    return result;
  }

 private:
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

  std::string_view digits() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  Integer integer_literal(const char* what) {
    skip_ws();
    const auto d = digits();
    if (d.empty()) fail({what}, "missing integer literal");
    return Integer(std::string(d));
  }

  DiffPoly expr() {
    DiffPoly acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  DiffPoly term() {
    DiffPoly acc = unary();
    for (;;) {
      if (accept('*')) {
        acc *= unary();
      } else if (accept('/')) {
        skip_ws();
        const std::size_t at = pos_;
        const Integer d = integer_literal("integer divisor");
        if (d == 0) {
          pos_ = at;
          fail({}, "division by zero");
        }
        acc /= Rational(d);
      } else {
        return acc;
      }
    }
  }

  DiffPoly unary() {
    if (accept('-')) return -unary();
    return power();
  }

  DiffPoly power() {
    DiffPoly base = atom();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    const Integer e = integer_literal("positive integer exponent");
    if (e <= 0 || e > 100000) {
      pos_ = at;
      fail({"positive integer exponent"}, "exponent out of range");
    }
    DiffPoly result(1);
    for (auto n = static_cast<unsigned>(e); n > 0; --n) result *= base;
    return result;
  }

  DiffPoly atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail({"integer", "'p'", "'q'", "'('", "'-'"}, "unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return DiffPoly(Rational(Integer(std::string(digits()))));
    if (c == 'p' || c == 'q') {
      ++pos_;
      return DiffPoly(DiffSymbol{c == 'p' ? Base::P : Base::Q, symbol_order()});
    }
    if (c == '(') {
      ++pos_;
      DiffPoly inner = expr();
      if (!accept(')')) fail({"')'"}, "unbalanced parenthesis");
      return inner;
    }
    fail({"integer", "'p'", "'q'", "'('", "'-'"}, std::string("unexpected character '") + c + "'");
  }

  unsigned symbol_order() {
    if (pos_ < text_.size() && text_[pos_] == '[') {
      ++pos_;
      const Integer k = integer_literal("derivative order");
      if (!accept(']')) fail({"']'"}, "unterminated derivative order");
      if (k > 1000) fail({}, "derivative order too large");
      return static_cast<unsigned>(k);
    }
    unsigned primes = 0;
    while (pos_ < text_.size() && text_[pos_] == '\'') {
      if (primes == kMaxPrimes) fail({}, "more than four apostrophes; write p[k] instead");
      ++primes;
      ++pos_;
    }
    return primes;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(DiffSymbol s) {
  std::string out(1, base_letter(s.base));
  if (s.order <= kMaxPrimes) return out + std::string(s.order, '\'');
  return out + "[" + std::to_string(s.order) + "]";
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

// Monomial

Monomial::Monomial(DiffSymbol s, unsigned exponent) {
  if (exponent > 0) {
    factors_.emplace_back(s, exponent);
    degree_ = exponent;
  }
}

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.first < b.first; });
  Monomial m;
  for (const auto& [sym, e] : factors) {
    if (e == 0) continue;
    if (!m.factors_.empty() && m.factors_.back().first == sym) {
      m.factors_.back().second += e;
    } else {
      m.factors_.emplace_back(sym, e);
    }
    m.degree_ += e;
  }
  return m;
}

unsigned Monomial::exponent(DiffSymbol s) const noexcept {
  const auto it = std::lower_bound(factors_.begin(), factors_.end(), s,
                                   [](const Factor& f, DiffSymbol x) { return f.first < x; });
  return it != factors_.end() && it->first == s ? it->second : 0;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors_.reserve(a.factors_.size() + b.factors_.size());
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() || j != b.factors_.end()) {
    if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
      out.factors_.push_back(*i++);
    } else if (i == a.factors_.end() || j->first < i->first) {
      out.factors_.push_back(*j++);
    } else {
      out.factors_.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  out.degree_ = a.degree_ + b.degree_;
  return out;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) noexcept {
  if (a.degree_ != b.degree_) return a.degree_ <=> b.degree_;
  const std::size_t n = std::min(a.factors_.size(), b.factors_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [sa, ea] = a.factors_[i];
    const auto& [sb, eb] = b.factors_[i];
    // The monomial holding the smaller symbol has the larger exponent there.
    if (sa != sb) return sa < sb ? std::strong_ordering::greater : std::strong_ordering::less;
    if (ea != eb) return ea <=> eb;
  }
  return a.factors_.size() <=> b.factors_.size();
}

// DiffPoly

DiffPoly::DiffPoly(const Rational& constant) { add_term(Monomial{}, constant); }

DiffPoly::DiffPoly(DiffSymbol s) { terms_.emplace(Monomial(s), Rational(1)); }

DiffPoly::DiffPoly(const Rational& coefficient, Monomial monomial) {
  add_term(monomial, coefficient);
}

void DiffPoly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

std::optional<Rational> DiffPoly::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_.begin()->first.is_one()) return terms_.begin()->second;
  return std::nullopt;
}

Rational DiffPoly::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

std::set<DiffSymbol> DiffPoly::symbols() const {
  std::set<DiffSymbol> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& [sym, e] : m.factors()) out.insert(sym);
  }
  return out;
}

std::optional<unsigned> DiffPoly::max_order() const {
  std::optional<unsigned> best;
  for (const auto& sym : symbols()) {
    if (!best || sym.order > *best) best = sym.order;
  }
  return best;
}

DiffPoly DiffPoly::operator-() const {
  DiffPoly out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

DiffPoly& DiffPoly::operator*=(const DiffPoly& other) { return *this = *this * other; }

DiffPoly& DiffPoly::operator*=(const Rational& scalar) {
  if (scalar == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= scalar;
  return *this;
}

DiffPoly& DiffPoly::operator/=(const Rational& scalar) {
  if (scalar == 0) throw std::domain_error("DiffPoly division by zero");
  for (auto& [m, c] : terms_) c /= scalar;
  return *this;
}

DiffPoly derive(const DiffPoly& a) {
  DiffPoly out;
  for (const auto& [m, c] : a.terms()) {
    const auto factors = m.factors();
    for (std::size_t i = 0; i < factors.size(); ++i) {
      std::vector<Monomial::Factor> next(factors.begin(), factors.end());
      const auto [sym, e] = factors[i];
      next[i].second = e - 1;
      next.emplace_back(sym.derived(), 1);
      out += DiffPoly(c * e, Monomial::from_factors(std::move(next)));
    }
  }
  return out;
}

DiffPoly drop_base(const DiffPoly& a, Base base) {
  DiffPoly out;
  for (const auto& [m, c] : a.terms()) {
    const auto f = m.factors();
    const bool vanishes =
        std::any_of(f.begin(), f.end(), [base](const auto& fe) { return fe.first.base == base; });
    if (!vanishes) out += DiffPoly(c, m);
  }
  return out;
}

DiffPoly parse_diffpoly(std::string_view text) { return PolyParser(text).parse(); }

std::string format(const DiffPoly& a, Style style) {
  if (style == Style::json) return detail::terms_to_json(a).dump();
  if (a.is_zero()) return "0";

  std::string out;
  bool first = true;
  for (const auto& [m, c] : a.terms()) {
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    if (first) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;

    const std::string coef = style == Style::plain ? to_string(mag) : latex_rational(mag);
    if (m.is_one()) {
      out += coef;
    } else {
      if (mag != 1) out += style == Style::plain ? coef + "*" : coef;
      out += format_monomial(m, style);
    }
  }
  return out;
}

double evaluate(const DiffPoly& a, const Assignment& values) {
  double total = 0.0;
  for (const auto& [m, c] : a.terms()) {
    double term = c.convert_to<double>();
    for (const auto& [sym, e] : m.factors()) {
      const auto it = values.find(sym);
      if (it == values.end()) throw MissingSymbolError(to_string(sym));
      term *= ipow(it->second, e);
    }
    total += term;
  }
  return total;
}

DiffPoly parse_diffpoly_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.byte, {}, e.what());
  }
  return detail::terms_from_json(doc);
}

namespace detail {

nlohmann::json terms_to_json(const DiffPoly& a) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : a.terms()) {
    nlohmann::json mono = nlohmann::json::array();
    for (const auto& [sym, e] : m.factors()) {
      mono.push_back({{"sym", std::string(1, base_letter(sym.base))}, {"order", sym.order}, {"exp", e}});
    }
    terms.push_back({{"num", numerator(c).str()}, {"den", denominator(c).str()}, {"monomial", mono}});
  }
  return terms;
}

DiffPoly terms_from_json(const nlohmann::json& terms) {
  if (!terms.is_array()) throw ParseError(0, {"array of terms"}, "malformed JSON polynomial");
  DiffPoly out;
  try {
    for (const auto& t : terms) {
      const Rational c(Integer(t.at("num").get<std::string>()), Integer(t.at("den").get<std::string>()));
      std::vector<Monomial::Factor> factors;
      for (const auto& f : t.at("monomial")) {
        const auto sym = f.at("sym").get<std::string>();
        if (sym != "p" && sym != "q") throw ParseError(0, {"\"p\"", "\"q\""}, "unknown symbol " + sym);
        factors.emplace_back(DiffSymbol{sym == "p" ? Base::P : Base::Q, f.at("order").get<unsigned>()},
                             f.at("exp").get<unsigned>());
      }
      out += DiffPoly(c, Monomial::from_factors(std::move(factors)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, {}, std::string("malformed JSON polynomial: ") + e.what());
  }
  return out;
}

}  // namespace detail

}  // namespace liftode
