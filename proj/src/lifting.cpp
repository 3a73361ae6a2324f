#include "liftode/lifting.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json_io.hpp"
#include "liftode/errors.hpp"

namespace liftode {

ModuleVector::ModuleVector(unsigned m) : m_(m), coords_(m + 1) {
  if (m < 1) throw std::domain_error("power m must be at least 1");
}

ModuleVector::ModuleVector(unsigned m, std::vector<DiffPoly> coords) : m_(m), coords_(std::move(coords)) {
  if (m < 1) throw std::domain_error("power m must be at least 1");
  if (coords_.size() != m + 1) throw std::invalid_argument("ModuleVector needs exactly m+1 coordinates");
}

ModuleVector ModuleVector::unit(unsigned m, unsigned i) {
  ModuleVector v(m);
  v[i] = DiffPoly(1);
  return v;
}

bool ModuleVector::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const DiffPoly& c) { return c.is_zero(); });
}

ModuleVector& ModuleVector::operator+=(const ModuleVector& other) {
  if (other.m_ != m_) throw std::invalid_argument("ModuleVector power mismatch");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
  return *this;
}

ModuleVector& ModuleVector::operator-=(const ModuleVector& other) {
  if (other.m_ != m_) throw std::invalid_argument("ModuleVector power mismatch");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= other.coords_[i];
  return *this;
}

ModuleVector& ModuleVector::operator*=(const DiffPoly& scalar) {
  for (auto& c : coords_) c *= scalar;
  return *this;
}

ModuleVector basis_step(const ModuleVector& v) {
  const unsigned m = v.power();
  const DiffPoly p = DiffPoly::p();
  const DiffPoly q = DiffPoly::q();
  ModuleVector w(m);
  for (unsigned j = 0; j <= m; ++j) {
    DiffPoly acc = derive(v[j]);
    if (j > 0) {
      acc += Rational(j) * (p * v[j]);
      acc += Rational(m - j + 1) * v[j - 1];
    }
    if (j < m) acc += Rational(j + 1) * (q * v[j + 1]);
    w[j] = std::move(acc);
  }
  return w;
}

std::vector<ModuleVector> derivative_tower(unsigned m) {
  if (m < 1) throw std::domain_error("power m must be at least 1");
  std::vector<ModuleVector> tower;
  tower.reserve(m + 2);
  tower.push_back(ModuleVector::unit(m, 0));
  for (unsigned k = 0; k <= m; ++k) tower.push_back(basis_step(tower.back()));
  return tower;
}

Integer falling_factorial(unsigned m, unsigned k) {
  Integer out = 1;
  for (unsigned i = 0; i < k; ++i) out *= Integer(m - i);
  return out;
}

LiftedODE derive_lifted_ode(unsigned m) {
  if (m < 1) throw std::domain_error("power m must be at least 1");
  const auto tower = derivative_tower(m);
  const ModuleVector& top = tower[m + 1];

  // top = sum_k a_k v_k; component j only sees v_j..v_m.
  std::vector<DiffPoly> a(m + 1);
  for (unsigned j = m + 1; j-- > 0;) {
    const auto diag = tower[j][j].constant_value();
    if (!diag || *diag != Rational(falling_factorial(m, j))) {
      throw std::logic_error("derivative tower lost its triangular shape at k=" + std::to_string(j));
    }
    DiffPoly rhs = top[j];
    for (unsigned k = j + 1; k <= m; ++k) rhs -= a[k] * tower[k][j];
    a[j] = rhs / *diag;
  }

  LiftedODE ode{m, {}};
  ode.coeffs.reserve(m + 1);
  for (auto& ak : a) ode.coeffs.push_back(-ak);
  return ode;
}

std::optional<unsigned> max_derivative_order(const LiftedODE& ode) {
  std::optional<unsigned> best;
  for (const auto& c : ode.coeffs) {
    const auto o = c.max_order();
    if (o && (!best || *o > *best)) best = o;
  }
  return best;
}

namespace {

std::string plain_derivative(unsigned k) {
  if (k == 0) return "y";
  if (k <= 3) return "y" + std::string(k, '\'');
  return "y^(" + std::to_string(k) + ")";
}

}  // namespace

std::string format(const LiftedODE& ode, Style style) {
  if (style == Style::json) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (unsigned k = 0; k < ode.coeffs.size(); ++k) {
      coeffs.push_back({{"k", k}, {"terms", detail::terms_to_json(ode.coeffs[k])}});
    }
    const nlohmann::json doc = {{"m", ode.m}, {"monic", true}, {"coeffs", coeffs}};
    return doc.dump(2) + "\n";
  }

  std::ostringstream os;
  if (style == Style::plain) {
    os << "# m = " << ode.m << ": " << plain_derivative(ode.m + 1);
    for (unsigned k = ode.m + 1; k-- > 0;) os << " + c" << k << "*" << plain_derivative(k);
    os << " = 0\n";
    for (unsigned k = ode.m + 1; k-- > 0;) os << "c" << k << " = " << format(ode.coeffs[k], style) << "\n";
  } else {
    for (unsigned k = ode.m + 1; k-- > 0;) os << "c_{" << k << "} = " << format(ode.coeffs[k], style) << "\n";
  }
  return os.str();
}

LiftedODE parse_lifted_ode_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.byte, {}, e.what());
  }
  try {
    LiftedODE ode;
    ode.m = doc.at("m").get<unsigned>();
    if (ode.m < 1 || !doc.at("monic").get<bool>()) throw ParseError(0, {}, "expected a monic ODE with m >= 1");
    const auto& coeffs = doc.at("coeffs");
    if (coeffs.size() != ode.m + 1) throw ParseError(0, {}, "expected m+1 coefficients");
    ode.coeffs.resize(ode.m + 1);
    for (const auto& entry : coeffs) {
      const auto k = entry.at("k").get<unsigned>();
      if (k > ode.m) throw ParseError(0, {}, "coefficient index out of range");
      ode.coeffs[k] = detail::terms_from_json(entry.at("terms"));
    }
    return ode;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, {}, std::string("malformed ODE document: ") + e.what());
  }
}

std::filesystem::path fixture_path(const std::filesystem::path& dir, unsigned m) {
  return dir / ("order_m" + std::to_string(m) + ".txt");
}

std::vector<DiffPoly> parse_fixture(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string_view::npos) lines.pop_back();

  std::vector<DiffPoly> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(parse_diffpoly(lines[i]));
    } catch (const ParseError& e) {
      throw FixtureFormatError("fixture line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<DiffPoly> load_fixture(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FixtureFormatError("cannot open fixture " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_fixture(buf.str());
  } catch (const FixtureFormatError& e) {
    throw FixtureFormatError(file.string() + ": " + e.what());
  }
}

bool FixtureReport::passed() const {
  return !entries.empty() && std::all_of(entries.begin(), entries.end(), [](const FixtureEntry& e) { return e.pass; });
}

std::size_t FixtureReport::pass_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const FixtureEntry& e) { return e.pass; }));
}

FixtureReport check_against_fixture(const LiftedODE& ode, std::span<const DiffPoly> fixture) {
  if (fixture.size() != ode.coeffs.size()) {
    throw FixtureFormatError("fixture for m=" + std::to_string(ode.m) + " must hold " +
                             std::to_string(ode.coeffs.size()) + " coefficients, found " +
                             std::to_string(fixture.size()));
  }
  FixtureReport report{ode.m, {}};
  for (unsigned k = 0; k < fixture.size(); ++k) {
    DiffPoly diff = ode.coeffs[k] - fixture[k];
    const bool pass = diff.is_zero();
    report.entries.push_back({k, pass, std::move(diff)});
  }
  return report;
}

FixtureReport check_against_fixture(unsigned m, std::span<const DiffPoly> fixture) {
  if (fixture.size() != m + 1) {
    throw FixtureFormatError("fixture for m=" + std::to_string(m) + " must hold " + std::to_string(m + 1) +
                             " coefficients, found " + std::to_string(fixture.size()));
  }
  return check_against_fixture(derive_lifted_ode(m), fixture);
}

}  // namespace liftode
