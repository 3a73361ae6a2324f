#include "liftode/cli.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include <CLI11.hpp>

#include "liftode/errors.hpp"
#include "liftode/lifting.hpp"
#include "liftode/verify.hpp"

#ifndef LIFTODE_DEFAULT_FIXTURE_DIR
#define LIFTODE_DEFAULT_FIXTURE_DIR "fixtures"
#endif

namespace liftode::cli {

namespace {

// Published fixtures exist for these powers only.
constexpr unsigned kFirstFixture = 2;
constexpr unsigned kLastFixture = 5;

struct DeriveArgs {
  unsigned m = 0;
  std::string style = "plain";
};

struct CheckArgs {
  unsigned m = 0;
  bool all = false;
  std::string fixtures = LIFTODE_DEFAULT_FIXTURE_DIR;
};

struct VerifyArgs {
  unsigned m = 0;
  std::string p;
  std::string q;
  std::array<double, 2> interval{0.0, 1.0};
  double step = 1e-3;
  std::array<double, 2> ic_f{1.0, 0.0};
  std::array<double, 2> ic_g{0.0, 1.0};
  bool json = false;
  double residual_tol = Tolerances{}.residual;
  double wronskian_tol = Tolerances{}.wronskian;
  std::string fixture;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int do_derive(const DeriveArgs& a, std::ostream& out) {
  Style style = Style::plain;
  if (a.style == "latex") {
    style = Style::latex;
  } else if (a.style == "json") {
    style = Style::json;
  }
  out << format(derive_lifted_ode(a.m), style);
  return kOk;
}

int do_check(const CheckArgs& a, std::ostream& out) {
  std::vector<unsigned> powers;
  if (a.all) {
    for (unsigned m = kFirstFixture; m <= kLastFixture; ++m) powers.push_back(m);
  } else {
    powers.push_back(a.m);
  }

  bool ok = true;
  for (const unsigned m : powers) {
    const auto path = fixture_path(a.fixtures, m);
    const auto fixture = load_fixture(path);
    const auto report = check_against_fixture(m, fixture);
    out << (report.passed() ? "PASS" : "FAIL") << "  m=" << m << "  " << path.filename().string() << "  ("
        << report.pass_count() << "/" << report.entries.size() << " coefficients match)\n";
    for (const auto& e : report.entries) {
      if (e.pass) continue;
      out << "      c" << e.k << ": derived - fixture = " << format(e.difference) << "\n";
    }
    ok = ok && report.passed();
  }
  return ok ? kOk : kFailure;
}

LiftedODE ode_for_verify(const VerifyArgs& a) {
  if (a.fixture.empty()) return derive_lifted_ode(a.m);
  const auto coeffs = load_fixture(a.fixture);
  if (coeffs.size() != a.m + 1) {
    throw FixtureFormatError(a.fixture + " holds " + std::to_string(coeffs.size()) + " coefficients, m=" +
                             std::to_string(a.m) + " needs " + std::to_string(a.m + 1));
  }
  return LiftedODE{a.m, coeffs};
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
  Expr p;
  Expr q;
  try {
    p = parse_expr(a.p);
  } catch (const ParseError& e) {
    throw UsageError(std::string("--p: ") + e.what());
  }
  try {
    q = parse_expr(a.q);
  } catch (const ParseError& e) {
    throw UsageError(std::string("--q: ") + e.what());
  }

  NumericConfig cfg;
  cfg.a = a.interval[0];
  cfg.b = a.interval[1];
  cfg.step = a.step;
  cfg.f = {a.ic_f[0], a.ic_f[1]};
  cfg.g = {a.ic_g[0], a.ic_g[1]};
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }

  const auto report = basis_check(ode_for_verify(a), p, q, cfg, Tolerances{a.residual_tol, a.wronskian_tol});
  out << (a.json ? report_to_json(report) : format_report(report));
  return report.pass ? kOk : kFailure;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Derive and check the linear ODE satisfied by powers of solutions of y'' = p y' + q y", "liftode"};
  app.require_subcommand(1);

  DeriveArgs derive_args;
  auto* derive = app.add_subcommand("derive", "Print the monic order-(m+1) ODE satisfied by f^m");
  derive->add_option("-m", derive_args.m, "Power m >= 1")->required()->check(CLI::PositiveNumber);
  derive->add_option("--style", derive_args.style, "Output style")
      ->check(CLI::IsMember({"plain", "latex", "json"}))
      ->capture_default_str();

  CheckArgs check_args;
  auto* check = app.add_subcommand("check-paper", "Compare derived coefficients with the transcribed fixtures");
  auto* check_m = check->add_option("-m", check_args.m, "Power to check (2..5)")
                      ->check(CLI::Range(kFirstFixture, kLastFixture));
  auto* check_all = check->add_flag("--all", check_args.all, "Check every available fixture");
  check_m->excludes(check_all);
  check->add_option("--fixtures", check_args.fixtures, "Fixture directory")->capture_default_str();

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Numerically check the basis claim for concrete p(x), q(x)");
  verify->add_option("-m", verify_args.m, "Power m >= 1")->required()->check(CLI::PositiveNumber);
  verify->add_option("--p", verify_args.p, "Coefficient p(x)")->required();
  verify->add_option("--q", verify_args.q, "Coefficient q(x)")->required();
  verify->add_option("--interval", verify_args.interval, "Interval a b")->capture_default_str();
  verify->add_option("--step", verify_args.step, "RK4 step h")->capture_default_str();
  verify->add_option("--ic-f", verify_args.ic_f, "f(a) f'(a)")->capture_default_str();
  verify->add_option("--ic-g", verify_args.ic_g, "g(a) g'(a)")->capture_default_str();
  verify->add_flag("--json", verify_args.json, "Emit the report as JSON");
  verify->add_option("--residual-tol", verify_args.residual_tol, "Relative residual tolerance")
      ->capture_default_str();
  verify->add_option("--wronskian-tol", verify_args.wronskian_tol, "Scaled Wronskian threshold")
      ->capture_default_str();
  verify->add_option("--fixture", verify_args.fixture, "Check a coefficient file instead of the derived ODE");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (check->parsed() && !check_args.all && check_m->count() == 0) {
      throw CLI::RequiredError("check-paper needs -m or --all");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "liftode: " << e.what() << "\nrun 'liftode --help' for usage\n";
    return kUsage;
  }

  try {
    if (derive->parsed()) return do_derive(derive_args, out);
    if (check->parsed()) return do_check(check_args, out);
    return do_verify(verify_args, out);
  } catch (const UsageError& e) {
    err << "liftode: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "liftode: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace liftode::cli
