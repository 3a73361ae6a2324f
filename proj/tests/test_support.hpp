#pragma once

#include <cmath>
#include <random>

#include "liftode/diffring.hpp"

namespace liftode::testing {

inline DiffPoly P(unsigned order = 0) { return DiffPoly::p(order); }
inline DiffPoly Q(unsigned order = 0) { return DiffPoly::q(order); }
inline DiffPoly C(long long v) { return DiffPoly(Rational(v)); }

// Random polynomial: up to `max_terms` terms, symbols of order <= max_order,
// small rational coefficients.
inline DiffPoly random_poly(std::mt19937_64& rng, int max_terms = 5, unsigned max_order = 3, bool rational = true) {
  std::uniform_int_distribution<int> n_terms(0, max_terms);
  std::uniform_int_distribution<int> n_factors(0, 3);
  std::uniform_int_distribution<int> base(0, 1);
  std::uniform_int_distribution<unsigned> order(0, max_order);
  std::uniform_int_distribution<unsigned> exponent(1, 3);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, rational ? 4 : 1);

  DiffPoly out;
  const int terms = n_terms(rng);
  for (int t = 0; t < terms; ++t) {
    std::vector<Monomial::Factor> factors;
    const int nf = n_factors(rng);
    for (int f = 0; f < nf; ++f) {
      factors.emplace_back(DiffSymbol{base(rng) == 0 ? Base::P : Base::Q, order(rng)}, exponent(rng));
    }
    out += DiffPoly(Rational(num(rng), den(rng)), Monomial::from_factors(std::move(factors)));
  }
  return out;
}

inline Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-12, 12);
  std::uniform_int_distribution<int> den(1, 5);
  return Rational(num(rng), den(rng));
}

// Values with magnitudes in [1e-3, 1e3] and random sign.
inline Assignment random_assignment(std::mt19937_64& rng, unsigned max_order) {
  std::uniform_real_distribution<double> log_mag(-3.0, 3.0);
  std::bernoulli_distribution negative(0.5);
  Assignment a;
  for (unsigned k = 0; k <= max_order; ++k) {
    for (const Base b : {Base::P, Base::Q}) {
      const double v = std::pow(10.0, log_mag(rng));
      a[DiffSymbol{b, k}] = negative(rng) ? -v : v;
    }
  }
  return a;
}

// Evaluation of the polynomial with every coefficient and value replaced by
// its absolute value: the natural scale for floating rounding error.
inline double magnitude(const DiffPoly& a, const Assignment& values) {
  double total = 0.0;
  for (const auto& [m, c] : a.terms()) {
    double term = std::fabs(c.convert_to<double>());
    for (const auto& [sym, e] : m.factors()) term *= std::pow(std::fabs(values.at(sym)), e);
    total += term;
  }
  return total;
}

}  // namespace liftode::testing
