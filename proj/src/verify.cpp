#include "liftode/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json_io.hpp"
#include "liftode/errors.hpp"

namespace liftode {

namespace {

double ipow(double base, unsigned e) {
  double result = 1.0;
  while (e > 0) {
    if (e & 1U) result *= base;
    base *= base;
    e >>= 1U;
  }
  return result;
}

// A DiffPoly with double coefficients and symbols resolved to positions in
// dense per-order value arrays; evaluates without map lookups.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const DiffPoly& a) {
    terms_.reserve(a.size());
    for (const auto& [m, c] : a.terms()) {
      Term t{c.convert_to<double>(), {}};
      for (const auto& [sym, e] : m.factors()) t.factors.push_back({sym.base, sym.order, e});
      terms_.push_back(std::move(t));
    }
  }

  double operator()(const std::vector<double>& p_vals, const std::vector<double>& q_vals) const {
    double total = 0.0;
    for (const auto& t : terms_) {
      double v = t.coefficient;
      for (const auto& f : t.factors) {
        const auto& vals = f.base == Base::P ? p_vals : q_vals;
        v *= ipow(vals.at(f.order), f.exponent);
      }
      total += v;
    }
    return total;
  }

 private:
  struct Factor {
    Base base;
    unsigned order;
    unsigned exponent;
  };
  struct Term {
    double coefficient;
    std::vector<Factor> factors;
  };
  std::vector<Term> terms_;
};

double relative_residual(std::span<const double> c_vals, std::span<const double> derivs) {
  const std::size_t order = c_vals.size();
  double r = derivs[order];
  double s = std::max(1.0, std::fabs(derivs[order]));
  for (std::size_t k = 0; k < order; ++k) {
    const double term = c_vals[k] * derivs[k];
    r += term;
    s = std::max(s, std::fabs(term));
  }
  return std::fabs(r) / s;
}

unsigned needed_order(const LiftedODE& ode) {
  return max_derivative_order(ode).value_or(0);
}

unsigned needed_order(std::span<const DiffPoly> polys) {
  unsigned best = 0;
  for (const auto& c : polys) best = std::max(best, c.max_order().value_or(0));
  return best;
}

std::vector<CompiledPoly> compile(std::span<const DiffPoly> polys) {
  std::vector<CompiledPoly> out;
  out.reserve(polys.size());
  for (const auto& c : polys) out.emplace_back(c);
  return out;
}

std::string monomial_name(unsigned i, unsigned j) {
  auto factor = [](char letter, unsigned e) {
    std::string s(1, letter);
    if (e > 1) s += "^" + std::to_string(e);
    return s;
  };
  if (i == 0) return factor('g', j);
  if (j == 0) return factor('f', i);
  return factor('f', i) + "*" + factor('g', j);
}

void update_max(MonomialResidual& slot, double r, double x) {
  // A NaN sticks: it always fails the tolerance comparison.
  if (std::isnan(slot.max_residual)) return;
  if (std::isnan(r) || r > slot.max_residual) {
    slot.max_residual = r;
    slot.worst_x = x;
  }
}

// Monomial tower evaluation with compiled coordinates.
struct CompiledMonomialTower {
  unsigned i;
  unsigned j;
  std::vector<std::vector<CompiledPoly>> levels;

  explicit CompiledMonomialTower(const MonomialTower& t) : i(t.f_power()), j(t.g_power()) {
    for (unsigned k = 0; k <= t.upto(); ++k) levels.push_back(compile(t.level(k)));
  }

  std::vector<double> values(const std::vector<double>& p_vals, const std::vector<double>& q_vals, InitialValue f,
                             InitialValue g) const {
    std::vector<double> basis((i + 1) * (j + 1));
    for (unsigned b = 0; b <= i; ++b) {
      for (unsigned d = 0; d <= j; ++d) {
        basis[b * (j + 1) + d] = ipow(f.value, i - b) * ipow(f.slope, b) * ipow(g.value, j - d) * ipow(g.slope, d);
      }
    }
    std::vector<double> out;
    out.reserve(levels.size());
    for (const auto& level : levels) {
      double total = 0.0;
      for (std::size_t n = 0; n < level.size(); ++n) total += level[n](p_vals, q_vals) * basis[n];
      out.push_back(total);
    }
    return out;
  }
};

}  // namespace

// NumericConfig

void NumericConfig::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) throw ConfigError("interval must satisfy a < b");
  if (!std::isfinite(step) || !(step > 0.0)) throw ConfigError("step must be positive");
  if ((b - a) / step < 10.0 - 1e-9) {
    throw ConfigError("step too large: the grid needs at least 10 steps across the interval");
  }
}

std::size_t NumericConfig::steps() const {
  const double n = (b - a) / step;
  const double nearest = std::round(n);
  if (std::fabs(n - nearest) <= 1e-9 * std::max(1.0, n)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(n));
}

bool NumericConfig::independent_initial_values() const {
  const double det = f.value * g.slope - f.slope * g.value;
  const double scale = std::hypot(f.value, f.slope) * std::hypot(g.value, g.slope);
  return scale > 0.0 && std::fabs(det) > 1e-12 * scale;
}

// Integration

Trajectory integrate_base(const Expr& p, const Expr& q, const NumericConfig& cfg, InitialValue init) {
  cfg.validate();
  const std::size_t n = cfg.steps();
  const double h = (cfg.b - cfg.a) / static_cast<double>(n);

  auto accel = [&](double x, double y, double yp) { return eval_expr(p, x) * yp + eval_expr(q, x) * y; };

  Trajectory t;
  t.grid.reserve(n + 1);
  t.f.reserve(n + 1);
  t.fp.reserve(n + 1);
  double y = init.value;
  double yp = init.slope;
  t.grid.push_back(cfg.a);
  t.f.push_back(y);
  t.fp.push_back(yp);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = cfg.a + static_cast<double>(k) * h;
    const double k1y = yp;
    const double k1v = accel(x, y, yp);
    const double k2y = yp + 0.5 * h * k1v;
    const double k2v = accel(x + 0.5 * h, y + 0.5 * h * k1y, k2y);
    const double k3y = yp + 0.5 * h * k2v;
    const double k3v = accel(x + 0.5 * h, y + 0.5 * h * k2y, k3y);
    const double k4y = yp + h * k3v;
    const double k4v = accel(x + h, y + h * k3y, k4y);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    yp += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t.grid.push_back(k + 1 == n ? cfg.b : cfg.a + static_cast<double>(k + 1) * h);
    t.f.push_back(y);
    t.fp.push_back(yp);
  }
  return t;
}

// CoefficientJets

CoefficientJets::CoefficientJets(const Expr& p, const Expr& q, unsigned max_order) {
  p_.reserve(max_order + 1);
  q_.reserve(max_order + 1);
  p_.push_back(p);
  q_.push_back(q);
  for (unsigned k = 1; k <= max_order; ++k) {
    p_.push_back(diff_expr(p_.back()));
    q_.push_back(diff_expr(q_.back()));
  }
}

Assignment CoefficientJets::at(double x) const {
  Assignment out;
  for (unsigned k = 0; k < p_.size(); ++k) {
    out[p_sym(k)] = eval_expr(p_[k], x);
    out[q_sym(k)] = eval_expr(q_[k], x);
  }
  return out;
}

void CoefficientJets::values_at(double x, std::vector<double>& p_vals, std::vector<double>& q_vals) const {
  p_vals.resize(p_.size());
  q_vals.resize(q_.size());
  for (std::size_t k = 0; k < p_.size(); ++k) {
    p_vals[k] = eval_expr(p_[k], x);
    q_vals[k] = eval_expr(q_[k], x);
  }
}

// Derivative values

std::vector<double> power_derivative_values(std::span<const ModuleVector> tower, const Assignment& symbols,
                                            double f, double fp) {
  std::vector<double> out;
  out.reserve(tower.size());
  for (const auto& v : tower) {
    const unsigned m = v.power();
    double total = 0.0;
    for (unsigned i = 0; i <= m; ++i) {
      if (v[i].is_zero()) continue;
      total += evaluate(v[i], symbols) * ipow(f, m - i) * ipow(fp, i);
    }
    out.push_back(total);
  }
  return out;
}

std::vector<double> power_derivative_values(double x, double f, double fp, unsigned m, const Expr& p,
                                            const Expr& q) {
  const auto tower = derivative_tower(m);
  unsigned order = 0;
  for (const auto& v : tower) order = std::max(order, needed_order(v.coords()));
  const CoefficientJets jets(p, q, order);
  return power_derivative_values(tower, jets.at(x), f, fp);
}

MonomialTower::MonomialTower(unsigned i, unsigned j, unsigned upto) : i_(i), j_(j) {
  if (i + j == 0) throw std::invalid_argument("monomial f^i g^j needs i + j >= 1");
  const std::size_t width = j + 1;
  auto at = [width](unsigned b, unsigned d) { return b * width + d; };
  const DiffPoly p = DiffPoly::p();
  const DiffPoly q = DiffPoly::q();

  std::vector<DiffPoly> v((i + 1) * (j + 1));
  v[0] = DiffPoly(1);
  levels_.push_back(v);
  for (unsigned k = 0; k < upto; ++k) {
    std::vector<DiffPoly> w(v.size());
    for (unsigned b = 0; b <= i; ++b) {
      for (unsigned d = 0; d <= j; ++d) {
        DiffPoly acc = derive(v[at(b, d)]);
        if (b + d > 0) acc += Rational(b + d) * (p * v[at(b, d)]);
        if (b > 0) acc += Rational(i - b + 1) * v[at(b - 1, d)];
        if (b < i) acc += Rational(b + 1) * (q * v[at(b + 1, d)]);
        if (d > 0) acc += Rational(j - d + 1) * v[at(b, d - 1)];
        if (d < j) acc += Rational(d + 1) * (q * v[at(b, d + 1)]);
        w[at(b, d)] = std::move(acc);
      }
    }
    v = std::move(w);
    levels_.push_back(v);
  }
}

std::vector<double> MonomialTower::values(const Assignment& symbols, InitialValue f, InitialValue g) const {
  std::vector<double> out;
  out.reserve(levels_.size());
  for (const auto& level : levels_) {
    double total = 0.0;
    for (unsigned b = 0; b <= i_; ++b) {
      for (unsigned d = 0; d <= j_; ++d) {
        const DiffPoly& c = level[b * (j_ + 1) + d];
        if (c.is_zero()) continue;
        total += evaluate(c, symbols) * ipow(f.value, i_ - b) * ipow(f.slope, b) * ipow(g.value, j_ - d) *
                 ipow(g.slope, d);
      }
    }
    out.push_back(total);
  }
  return out;
}

std::vector<double> monomial_derivative_values(InitialValue f, InitialValue g, unsigned i, unsigned j,
                                               const Expr& p, const Expr& q, double x, unsigned upto) {
  if (i + j + 1 != upto) {
    throw std::invalid_argument("monomial_derivative_values needs upto == i + j + 1 (got i=" + std::to_string(i) +
                                ", j=" + std::to_string(j) + ", upto=" + std::to_string(upto) + ")");
  }
  const MonomialTower tower(i, j, upto);
  unsigned order = 0;
  for (unsigned k = 0; k <= upto; ++k) order = std::max(order, needed_order(tower.level(k)));
  const CoefficientJets jets(p, q, order);
  return tower.values(jets.at(x), f, g);
}

double residual(const LiftedODE& ode, std::span<const double> derivs, const Assignment& symbols) {
  if (derivs.size() != ode.m + 2) throw std::invalid_argument("residual needs m+2 derivative values");
  std::vector<double> c_vals;
  c_vals.reserve(ode.coeffs.size());
  for (const auto& c : ode.coeffs) c_vals.push_back(evaluate(c, symbols));
  return relative_residual(c_vals, derivs);
}

double determinant(std::vector<std::vector<double>> rows) {
  const std::size_t n = rows.size();
  for (const auto& r : rows) {
    if (r.size() != n) throw std::invalid_argument("determinant needs a square matrix");
  }
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(rows[r][col]) > std::fabs(rows[pivot][col])) pivot = r;
    }
    if (rows[pivot][col] == 0.0) return 0.0;
    if (pivot != col) {
      std::swap(rows[pivot], rows[col]);
      det = -det;
    }
    det *= rows[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = rows[r][col] / rows[col][col];
      for (std::size_t c = col; c < n; ++c) rows[r][c] -= factor * rows[col][c];
    }
  }
  return det;
}

double equilibrated_wronskian_ratio(std::vector<std::vector<double>> rows) {
  const std::size_t n = rows.size();
  for (auto& r : rows) {
    double norm2 = 0.0;
    for (const double v : r) norm2 += v * v;
    if (!(norm2 > 0.0)) return 0.0;
    const double norm = std::sqrt(norm2);
    for (double& v : r) v /= norm;
  }
  double scale = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    double norm2 = 0.0;
    for (const auto& r : rows) norm2 += r.at(c) * r.at(c);
    if (!(norm2 > 0.0)) return 0.0;
    scale *= std::sqrt(norm2);
  }
  return std::fabs(determinant(std::move(rows))) / scale;
}

double BasisReport::max_residual() const {
  double worst = 0.0;
  for (const auto& mr : monomials) {
    if (std::isnan(mr.max_residual)) return mr.max_residual;
    worst = std::max(worst, mr.max_residual);
  }
  return worst;
}

BasisReport basis_check(const LiftedODE& ode, const Expr& p, const Expr& q, const NumericConfig& cfg,
                        const Tolerances& tol) {
  cfg.validate();
  const unsigned m = ode.m;

  std::vector<MonomialTower> towers;
  towers.reserve(m + 1);
  unsigned order = needed_order(ode);
  for (unsigned j = 0; j <= m; ++j) {
    towers.emplace_back(m - j, j, m + 1);
    for (unsigned k = 0; k <= m + 1; ++k) order = std::max(order, needed_order(towers.back().level(k)));
  }
  std::vector<CompiledMonomialTower> compiled;
  compiled.reserve(towers.size());
  for (const auto& t : towers) compiled.emplace_back(t);
  const auto c_polys = compile(ode.coeffs);

  const CoefficientJets jets(p, q, order);
  const Trajectory tf = integrate_base(p, q, cfg, cfg.f);
  const Trajectory tg = integrate_base(p, q, cfg, cfg.g);

  BasisReport report;
  report.m = m;
  report.p = format_expr(p);
  report.q = format_expr(q);
  report.a = cfg.a;
  report.b = cfg.b;
  report.step = cfg.step;
  report.independent_initial_values = cfg.independent_initial_values();
  for (unsigned j = 0; j <= m; ++j) report.monomials.push_back({m - j, j, 0.0, cfg.a});

  const std::size_t mid = (tf.size() - 1) / 2;
  std::vector<std::vector<double>> columns(m + 1);
  std::vector<double> p_vals, q_vals, c_vals(m + 1);

  for (std::size_t n = 0; n < tf.size(); ++n) {
    const double x = tf.grid[n];
    jets.values_at(x, p_vals, q_vals);
    for (unsigned k = 0; k <= m; ++k) c_vals[k] = c_polys[k](p_vals, q_vals);
    const InitialValue f{tf.f[n], tf.fp[n]};
    const InitialValue g{tg.f[n], tg.fp[n]};
    for (unsigned j = 0; j <= m; ++j) {
      const auto derivs = compiled[j].values(p_vals, q_vals, f, g);
      update_max(report.monomials[j], relative_residual(c_vals, derivs), x);
      if (n == mid) columns[j] = derivs;
    }
  }

  // Rows are derivative orders 0..m, columns the monomials.
  report.wronskian_x = tf.grid[mid];
  std::vector<std::vector<double>> w(m + 1, std::vector<double>(m + 1));
  double scale = 1.0;
  for (unsigned j = 0; j <= m; ++j) {
    double norm2 = 0.0;
    for (unsigned k = 0; k <= m; ++k) {
      w[k][j] = columns[j][k];
      norm2 += columns[j][k] * columns[j][k];
    }
    scale *= std::sqrt(norm2);
  }
  report.wronskian = determinant(w);
  report.wronskian_scale = scale;
  report.wronskian_ratio = equilibrated_wronskian_ratio(std::move(w));

  report.residuals_pass = std::all_of(report.monomials.begin(), report.monomials.end(),
                                      [&](const MonomialResidual& r) { return r.max_residual < tol.residual; });
  report.wronskian_pass = report.wronskian_ratio > tol.wronskian;
  report.pass = report.residuals_pass && report.wronskian_pass && report.independent_initial_values;
  return report;
}

double max_power_residual(const LiftedODE& ode, const Expr& p, const Expr& q, const NumericConfig& cfg) {
  const unsigned m = ode.m;
  const auto tower = derivative_tower(m);
  unsigned order = needed_order(ode);
  std::vector<std::vector<CompiledPoly>> levels;
  for (const auto& v : tower) {
    order = std::max(order, needed_order(v.coords()));
    levels.push_back(compile(v.coords()));
  }
  const auto c_polys = compile(ode.coeffs);
  const CoefficientJets jets(p, q, order);
  const Trajectory tf = integrate_base(p, q, cfg, cfg.f);

  MonomialResidual worst{m, 0, 0.0, cfg.a};
  std::vector<double> p_vals, q_vals, c_vals(m + 1), derivs(m + 2);
  for (std::size_t n = 0; n < tf.size(); ++n) {
    const double x = tf.grid[n];
    jets.values_at(x, p_vals, q_vals);
    for (unsigned k = 0; k <= m; ++k) c_vals[k] = c_polys[k](p_vals, q_vals);
    for (unsigned k = 0; k <= m + 1; ++k) {
      double total = 0.0;
      for (unsigned i = 0; i <= m; ++i) total += levels[k][i](p_vals, q_vals) * ipow(tf.f[n], m - i) * ipow(tf.fp[n], i);
      derivs[k] = total;
    }
    update_max(worst, relative_residual(c_vals, derivs), x);
  }
  return worst.max_residual;
}

// Reports

std::string format_report(const BasisReport& r) {
  std::ostringstream os;
  os << "m = " << r.m << "   p(x) = " << r.p << "   q(x) = " << r.q << "\n";
  os << "interval [" << r.a << ", " << r.b << "]   h = " << r.step << "\n\n";
  os << std::left << std::setw(14) << "monomial" << std::setw(16) << "max residual" << "at x\n";
  for (const auto& mr : r.monomials) {
    std::ostringstream res;
    res << std::scientific << std::setprecision(3) << mr.max_residual;
    os << std::left << std::setw(14) << monomial_name(mr.f_power, mr.g_power) << std::setw(16) << res.str()
       << mr.worst_x << "\n";
  }
  os << "\nWronskian at x = " << r.wronskian_x << ": " << std::scientific << std::setprecision(6) << r.wronskian
     << " (column-norm scale " << r.wronskian_scale << ", row-equilibrated ratio " << r.wronskian_ratio
     << ")\n";
  os << std::defaultfloat;
  os << "initial values independent: " << (r.independent_initial_values ? "yes" : "no") << "\n";
  os << "residuals: " << (r.residuals_pass ? "PASS" : "FAIL") << "   wronskian: " << (r.wronskian_pass ? "PASS" : "FAIL")
     << "\n";
  os << "result: " << (r.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string report_to_json(const BasisReport& r) {
  nlohmann::json monomials = nlohmann::json::array();
  for (const auto& mr : r.monomials) {
    monomials.push_back({{"monomial", monomial_name(mr.f_power, mr.g_power)},
                         {"f_power", mr.f_power},
                         {"g_power", mr.g_power},
                         {"max_residual", mr.max_residual},
                         {"worst_x", mr.worst_x}});
  }
  const nlohmann::json doc = {
      {"m", r.m},
      {"p", r.p},
      {"q", r.q},
      {"interval", {r.a, r.b}},
      {"h", r.step},
      {"monomials", monomials},
      {"wronskian",
       {{"x", r.wronskian_x}, {"value", r.wronskian}, {"scale", r.wronskian_scale}, {"ratio", r.wronskian_ratio}}},
      {"independent_initial_values", r.independent_initial_values},
      {"residuals_pass", r.residuals_pass},
      {"wronskian_pass", r.wronskian_pass},
      {"pass", r.pass},
  };
  return doc.dump(2) + "\n";
}

}  // namespace liftode
