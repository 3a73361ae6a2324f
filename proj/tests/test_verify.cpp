#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "liftode/errors.hpp"
#include "liftode/verify.hpp"

using namespace liftode;

namespace {

struct Pair {
  const char* p;
  const char* q;
};

const Pair kSuite[] = {{"0", "-1"}, {"sin(x)", "x"}, {"1/(x+2)", "exp(-x)"}, {"x^2", "ln(x+2)"}};

NumericConfig cos_config(double step = 1e-3) {
  NumericConfig cfg;
  cfg.step = step;
  cfg.f = {1.0, 0.0};
  return cfg;
}

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::max(std::fabs(a), std::fabs(b))); }

}  // namespace

TEST_SUITE("integrator") {
  TEST_CASE("cosine") {
    const auto t = integrate_base(Expr(), Expr::constant(-1), cos_config());
    REQUIRE(t.size() == 1001);
    CHECK(t.grid.back() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::fabs(t.f.back() - std::cos(1.0)) < 1e-10);
    CHECK(std::fabs(t.fp.back() + std::sin(1.0)) < 1e-10);
  }

  TEST_CASE("exponential") {
    NumericConfig cfg;
    cfg.f = {1.0, 1.0};
    const auto t = integrate_base(Expr(), Expr::constant(1), cfg);
    CHECK(std::fabs(t.f.back() - std::exp(1.0)) < 1e-9);
  }

  TEST_CASE("grid is uniform") {
    NumericConfig cfg;
    cfg.a = -0.3;
    cfg.b = 1.7;
    cfg.step = 0.03;  // 2/0.03 is not an integer: round up
    CHECK(cfg.steps() == 67);
    const auto t = integrate_base(Expr(), Expr::constant(-1), cfg);
    const double h = t.grid[1] - t.grid[0];
    for (std::size_t k = 1; k < t.size(); ++k) CHECK(std::fabs((t.grid[k] - t.grid[k - 1]) - h) <= 1e-12 * h * 1e3);
    CHECK(t.grid.back() == doctest::Approx(1.7).epsilon(1e-14));
  }

  TEST_CASE("configuration errors") {
    NumericConfig cfg;
    cfg.step = 0.2;
    CHECK_THROWS_AS(integrate_base(Expr(), Expr(), cfg), ConfigError);
    cfg.step = 0.1;
    CHECK_NOTHROW(cfg.validate());
    cfg.step = -1e-3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = NumericConfig{};
    cfg.a = 1.0;
    cfg.b = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("domain errors carry the offending x") {
    NumericConfig cfg;
    cfg.a = -1.0;
    cfg.b = 1.0;
    try {
      integrate_base(parse_expr("ln(x)"), Expr(), cfg);
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      CHECK(e.node() == "ln(x)");
      CHECK(e.x() == -1.0);
    }
  }

  TEST_CASE("fourth-order convergence") {
    const auto err = [](double h) {
      return std::fabs(integrate_base(Expr(), Expr::constant(-1), cos_config(h)).f.back() - std::cos(1.0));
    };
    const double ratio = err(0.1) / err(0.05);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
}

TEST_SUITE("derivative values") {
  TEST_CASE("m = 1 reproduces the base equation") {
    const auto v = power_derivative_values(0.4, 1.3, -0.2, 1, parse_expr("sin(x)"), parse_expr("x"));
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 1.3);
    CHECK(v[1] == -0.2);
    CHECK(v[2] == doctest::Approx(std::sin(0.4) * -0.2 + 0.4 * 1.3).epsilon(1e-15));
  }

  TEST_CASE("cos squared at 0") {
    const auto v = power_derivative_values(0.0, 1.0, 0.0, 2, Expr(), Expr::constant(-1));
    CHECK(v == std::vector<double>{1.0, 0.0, -2.0, 0.0});
    CHECK(power_derivative_values(0.9, 0.37, 5.0, 2, Expr(), Expr())[0] == 0.37 * 0.37);
  }

  TEST_CASE("cos sin at 0") {
    const auto w = monomial_derivative_values({1.0, 0.0}, {0.0, 1.0}, 1, 1, Expr(), Expr::constant(-1), 0.0, 3);
    CHECK(w == std::vector<double>{0.0, 1.0, 0.0, -4.0});
    CHECK_THROWS_AS(
        monomial_derivative_values({1.0, 0.0}, {0.0, 1.0}, 1, 1, Expr(), Expr::constant(-1), 0.0, 4),
        std::invalid_argument);
  }

  TEST_CASE("the two evaluators agree on pure powers") {
    const Expr p = parse_expr("1/(x+2)");
    const Expr q = parse_expr("exp(-x)");
    for (unsigned m = 1; m <= 6; ++m) {
      for (double x : {0.0, 0.3, 0.95}) {
        const auto a = power_derivative_values(x, 0.8, -1.1, m, p, q);
        const auto b = monomial_derivative_values({0.8, -1.1}, {0.4, 2.0}, m, 0, p, q, x, m + 1);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(rel_diff(a[k], b[k]) <= 1e-12);
      }
    }
  }

  TEST_CASE("monomial tower shape") {
    const MonomialTower t(2, 1, 4);
    CHECK(t.upto() == 4);
    CHECK(t.level(0).size() == 6);
    CHECK(t.level(0)[0] == DiffPoly(1));
    for (std::size_t e = 1; e < 6; ++e) CHECK(t.level(0)[e].is_zero());
  }
}

TEST_SUITE("residuals") {
  TEST_CASE("cos squared satisfies the m = 2 equation") {
    const auto ode = derive_lifted_ode(2);
    CHECK(max_power_residual(ode, Expr(), Expr::constant(-1), cos_config()) < 1e-9);
  }

  TEST_CASE("flipping c0 is invisible when p and q are constant") {
    // c0 = 4pq - 2q' vanishes identically for p = 0, q = -1.
    auto ode = derive_lifted_ode(2);
    ode.coeffs[0] = -ode.coeffs[0];
    CHECK(max_power_residual(ode, Expr(), Expr::constant(-1), cos_config()) < 1e-9);
  }

  TEST_CASE("sign flips are detected where the coefficient does not vanish") {
    auto ode = derive_lifted_ode(2);
    ode.coeffs[1] = -ode.coeffs[1];
    CHECK(max_power_residual(ode, Expr(), Expr::constant(-1), cos_config()) > 1e-2);
    ode = derive_lifted_ode(2);
    ode.coeffs[0] = -ode.coeffs[0];
    CHECK(max_power_residual(ode, parse_expr("sin(x)"), parse_expr("x"), cos_config()) > 1e-2);
  }

  TEST_CASE("residual of the exact m = 1 relation vanishes") {
    const auto ode = derive_lifted_ode(1);
    const Assignment s{{p_sym(0), 0.5}, {q_sym(0), -2.0}};
    const std::vector<double> derivs{1.5, 3.0, 0.5 * 3.0 - 2.0 * 1.5};
    CHECK(residual(ode, derivs, s) == 0.0);
    const std::vector<double> off{1.5, 3.0, 1.0};
    CHECK(residual(ode, off, s) == doctest::Approx(2.5 / 3.0));
  }

  TEST_CASE("every suite passes for m = 2..5") {
    for (unsigned m = 2; m <= 5; ++m) {
      const auto ode = derive_lifted_ode(m);
      for (const auto& pair : kSuite) {
        const auto report = basis_check(ode, parse_expr(pair.p), parse_expr(pair.q), NumericConfig{});
        CHECK_MESSAGE(report.pass, "m = " << m << ", p = " << pair.p << ", q = " << pair.q);
        CHECK(report.max_residual() < 1e-6);
        CHECK(report.monomials.size() == m + 1);
        CHECK(report.wronskian_ratio > 1e-8);
        CHECK(max_power_residual(ode, parse_expr(pair.p), parse_expr(pair.q), NumericConfig{}) < 1e-6);
      }
    }
  }

  TEST_CASE("a 1% change in any coefficient is visible") {
    const Expr p = parse_expr("sin(x)");
    const Expr q = parse_expr("x");
    for (unsigned m = 2; m <= 5; ++m) {
      const auto ode = derive_lifted_ode(m);
      for (unsigned k = 0; k <= m; ++k) {
        auto bad = ode;
        bad.coeffs[k] *= Rational(101, 100);
        const auto report = basis_check(bad, p, q, NumericConfig{});
        CHECK_MESSAGE(report.max_residual() > 1e-4, "m = " << m << ", k = " << k);
        CHECK_FALSE(report.pass);
      }
    }
  }

  TEST_CASE("the printed m = 4 table fails numerically") {
    auto ode = derive_lifted_ode(4);
    ode.coeffs[1] = parse_diffpoly(
        "64*q^2+24*p^4+56*p'*q+11*p*p''-46*p^2*p'-208*p^2*q+128*p*q'-p'''+7*p'^2-18*q''");
    ode.coeffs[2] = parse_diffpoly("4*p*p' - 5*p'' -30*q' +120*p*q - 50*p^3");
    const auto report = basis_check(ode, parse_expr("sin(x)"), parse_expr("x"), NumericConfig{});
    CHECK_FALSE(report.residuals_pass);
    CHECK(report.max_residual() > 1e-2);
  }
}

TEST_SUITE("wronskian") {
  TEST_CASE("determinant") {
    CHECK(determinant({{1, 0, 0}, {0, 1, 0}, {-2, 0, 2}}) == 2.0);
    CHECK(determinant({{0, 1}, {1, 0}}) == -1.0);
    CHECK(determinant({{1, 2}, {2, 4}}) == 0.0);
    CHECK(equilibrated_wronskian_ratio({{1, 0}, {0, 1}}) == 1.0);
    CHECK(equilibrated_wronskian_ratio({{1, 2}, {2, 4}}) == 0.0);
    CHECK(equilibrated_wronskian_ratio({{0, 0}, {0, 1}}) == 0.0);
  }

  TEST_CASE("cos^2, cos sin, sin^2 at 0") {
    NumericConfig cfg;
    cfg.a = -1.0;
    cfg.b = 1.0;
    const auto report = basis_check(derive_lifted_ode(2), Expr(), Expr::constant(-1), cfg);
    CHECK(report.wronskian_x == 0.0);
    CHECK(report.wronskian == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(report.pass);
  }

  TEST_CASE("dependent solutions fail") {
    NumericConfig cfg;
    cfg.f = {1.0, 0.0};
    cfg.g = {2.0, 0.0};
    CHECK_FALSE(cfg.independent_initial_values());
    const auto report = basis_check(derive_lifted_ode(2), Expr(), Expr::constant(-1), cfg);
    CHECK(report.residuals_pass);
    CHECK_FALSE(report.wronskian_pass);
    CHECK_FALSE(report.pass);
    CHECK(std::fabs(report.wronskian) < 1e-12);
  }

  TEST_CASE("m = 4 with sin(x), x and generic initial values") {
    NumericConfig cfg;
    cfg.f = {0.7, -0.3};
    cfg.g = {-0.2, 1.1};
    const auto report = basis_check(derive_lifted_ode(4), parse_expr("sin(x)"), parse_expr("x"), cfg);
    CHECK(report.monomials.size() == 5);
    for (const auto& mono : report.monomials) CHECK(mono.max_residual < 1e-6);
    CHECK(report.pass);
  }
}

TEST_SUITE("reports") {
  TEST_CASE("json report fields") {
    const auto report = basis_check(derive_lifted_ode(2), Expr(), Expr::constant(-1), NumericConfig{});
    const auto doc = nlohmann::json::parse(report_to_json(report));
    CHECK(doc["m"] == 2);
    CHECK(doc["p"] == "0");
    CHECK(doc["q"] == "-1");
    CHECK(doc["interval"] == nlohmann::json::array({0.0, 1.0}));
    CHECK(doc["h"] == 1e-3);
    CHECK(doc["monomials"].size() == 3);
    CHECK(doc["monomials"][1]["monomial"] == "f*g");
    CHECK(doc["pass"] == true);
    CHECK(doc["wronskian"].contains("ratio"));
  }

  TEST_CASE("table names every monomial") {
    const auto report = basis_check(derive_lifted_ode(3), Expr(), Expr::constant(-1), NumericConfig{});
    const std::string table = format_report(report);
    for (const char* name : {"f^3", "f^2*g", "f*g^2", "g^3"}) CHECK(table.find(name) != std::string::npos);
    CHECK(table.find("PASS") != std::string::npos);
  }
}
