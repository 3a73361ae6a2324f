#pragma once

// Numerical checks of a lifted ODE: integrate the base equation
// y'' = p y' + q y, form the monomials f^i g^j (i + j = m), and measure how
// well each satisfies the lifted equation along the trajectory. Derivatives
// of the monomials come from the symbolic towers evaluated at (f, f', g, g')
// and the derivative values of p and q, never from finite differences.

#include <span>
#include <string>
#include <vector>

#include "liftode/diffring.hpp"
#include "liftode/expr.hpp"
#include "liftode/lifting.hpp"

namespace liftode {

/// (y(a), y'(a)).
struct InitialValue {
  double value = 0.0;
  double slope = 0.0;
};

struct NumericConfig {
  double a = 0.0;
  double b = 1.0;
  double step = 1e-3;
  InitialValue f{1.0, 0.0};
  InitialValue g{0.0, 1.0};

  /// Throws ConfigError unless a < b, step > 0 and (b - a)/step >= 10.
  void validate() const;
  /// Number of RK4 steps; the grid spacing is (b - a)/steps().
  std::size_t steps() const;
  /// The pairs (f(a), f'(a)) and (g(a), g'(a)) are not parallel.
  bool independent_initial_values() const;
};

struct Trajectory {
  std::vector<double> grid;
  std::vector<double> f;
  std::vector<double> fp;

  std::size_t size() const noexcept { return grid.size(); }
};

/// Classical fixed-step RK4 on (y, y')' = (y', p y' + q y). Domain errors
/// from p or q propagate as DomainError.
Trajectory integrate_base(const Expr& p, const Expr& q, const NumericConfig& cfg, InitialValue init);
inline Trajectory integrate_base(const Expr& p, const Expr& q, const NumericConfig& cfg) {
  return integrate_base(p, q, cfg, cfg.f);
}

/// p, p', ..., p^(n) and q, ..., q^(n) as expression trees, evaluated on
/// demand into an Assignment for the DiffPoly evaluator.
class CoefficientJets {
 public:
  CoefficientJets(const Expr& p, const Expr& q, unsigned max_order);

  unsigned max_order() const noexcept { return static_cast<unsigned>(p_.size()) - 1; }
  Assignment at(double x) const;
  /// Values indexed [order]; used by the compiled evaluators.
  void values_at(double x, std::vector<double>& p_vals, std::vector<double>& q_vals) const;

 private:
  std::vector<Expr> p_;
  std::vector<Expr> q_;
};

/// y^(k) for y = f^m, k = 0..m+1, from the tower of lifting.
std::vector<double> power_derivative_values(std::span<const ModuleVector> tower, const Assignment& symbols,
                                            double f, double fp);
std::vector<double> power_derivative_values(double x, double f, double fp, unsigned m, const Expr& p,
                                            const Expr& q);

/// Coordinates of w^(k), w = f^i g^j, over f^(i-b) (f')^b g^(j-d) (g')^d,
/// obtained by differentiating and rewriting f'' and g'' with the base
/// equation. Entry [b * (j+1) + d].
class MonomialTower {
 public:
  MonomialTower(unsigned i, unsigned j, unsigned upto);

  unsigned f_power() const noexcept { return i_; }
  unsigned g_power() const noexcept { return j_; }
  unsigned upto() const noexcept { return static_cast<unsigned>(levels_.size()) - 1; }
  const std::vector<DiffPoly>& level(unsigned k) const { return levels_.at(k); }

  std::vector<double> values(const Assignment& symbols, InitialValue f, InitialValue g) const;

 private:
  unsigned i_;
  unsigned j_;
  std::vector<std::vector<DiffPoly>> levels_;
};

/// Derivatives 0..upto of f^i g^j at x. (f, f') and (g, g') are passed as
/// InitialValue pairs. Requires upto == i + j + 1; throws
/// std::invalid_argument otherwise.
std::vector<double> monomial_derivative_values(InitialValue f, InitialValue g, unsigned i, unsigned j,
                                               const Expr& p, const Expr& q, double x, unsigned upto);

/// r / s with r = y^(m+1) + sum_k c_k y^(k) and
/// s = max(1, |y^(m+1)|, max_k |c_k y^(k)|).
double residual(const LiftedODE& ode, std::span<const double> derivs, const Assignment& symbols);

/// Determinant by partial-pivot elimination; `rows` is square, row-major.
double determinant(std::vector<std::vector<double>> rows);

/// |det| / prod(column norms) of `rows` after scaling each row to unit norm.
/// Returns 0 when any row or column vanishes.
double equilibrated_wronskian_ratio(std::vector<std::vector<double>> rows);

struct Tolerances {
  double residual = 1e-6;
  double wronskian = 1e-8;
};

struct MonomialResidual {
  unsigned f_power = 0;
  unsigned g_power = 0;
  double max_residual = 0.0;
  double worst_x = 0.0;
};

struct BasisReport {
  unsigned m = 0;
  std::string p;
  std::string q;
  double a = 0.0;
  double b = 0.0;
  double step = 0.0;
  std::vector<MonomialResidual> monomials;
  double wronskian_x = 0.0;
  double wronskian = 0.0;
  /// Product of the raw Wronskian matrix's column norms.
  double wronskian_scale = 0.0;
  /// |det| / prod(column norms) after each derivative-order row has been
  /// scaled to unit norm; in [0, 1], and 0 exactly for dependent monomials.
  double wronskian_ratio = 0.0;
  bool independent_initial_values = false;
  bool residuals_pass = false;
  bool wronskian_pass = false;
  bool pass = false;

  double max_residual() const;
};

/// Residual of every f^(m-j) g^j over the grid, plus the Wronskian of those
/// m+1 monomials at the grid midpoint. Passes when every residual is below
/// tol.residual and wronskian_ratio > tol.wronskian.
///
/// Rows of the Wronskian are equilibrated before the Hadamard-style ratio is
/// taken: the k-th derivatives grow roughly geometrically in k, and without
/// row scaling the raw ratio of an exactly independent basis drops below
/// 1e-8 already at m = 5.
BasisReport basis_check(const LiftedODE& ode, const Expr& p, const Expr& q, const NumericConfig& cfg,
                        const Tolerances& tol = {});

/// Largest relative residual of f^m alone over the f trajectory.
double max_power_residual(const LiftedODE& ode, const Expr& p, const Expr& q, const NumericConfig& cfg);

std::string format_report(const BasisReport& report);
/// { "m", "p", "q", "interval", "h", "monomials": [...], "wronskian", "pass", ... }
std::string report_to_json(const BasisReport& report);

}  // namespace liftode
