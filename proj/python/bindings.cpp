#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "liftode/errors.hpp"
#include "liftode/expr.hpp"
#include "liftode/lifting.hpp"
#include "liftode/verify.hpp"

namespace py = pybind11;
using namespace liftode;

namespace {

Style parse_style(const std::string& s) {
  if (s == "plain") return Style::plain;
  if (s == "latex") return Style::latex;
  if (s == "json") return Style::json;
  throw py::value_error("style must be plain, latex or json");
}

std::vector<std::string> coefficient_strings(const LiftedODE& ode) {
  std::vector<std::string> out;
  for (const auto& c : ode.coeffs) out.push_back(format(c, Style::plain));
  return out;
}

}  // namespace

PYBIND11_MODULE(_liftode, mod) {
  mod.doc() = "Linear ODEs satisfied by powers of solutions of y'' = p y' + q y";

  py::register_exception<ParseError>(mod, "ParseError", PyExc_ValueError);
  py::register_exception<DomainError>(mod, "DomainError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<FixtureFormatError>(mod, "FixtureFormatError", PyExc_ValueError);

  mod.def(
      "derive",
      [](unsigned m, const std::string& style) { return format(derive_lifted_ode(m), parse_style(style)); },
      py::arg("m"), py::arg("style") = "plain", "Formatted monic ODE for f^m.");

  mod.def(
      "coefficients", [](unsigned m) { return coefficient_strings(derive_lifted_ode(m)); }, py::arg("m"),
      "c_0..c_m as plain strings; index k multiplies y^(k).");

  mod.def(
      "normalize", [](const std::string& text) { return format(parse_diffpoly(text), Style::plain); },
      py::arg("text"), "Parse a differential polynomial and print it in canonical form.");

  mod.def(
      "derivative",
      [](const std::string& text) { return format(derive(parse_diffpoly(text)), Style::plain); },
      py::arg("text"), "Formal derivative of a differential polynomial in p, q.");

  mod.def(
      "check_fixture",
      [](unsigned m, const std::filesystem::path& file) {
        const auto report = check_against_fixture(m, load_fixture(file));
        py::list entries;
        for (const auto& e : report.entries) {
          entries.append(py::dict(py::arg("k") = e.k, py::arg("pass") = e.pass,
                                  py::arg("difference") = format(e.difference, Style::plain)));
        }
        return py::dict(py::arg("m") = m, py::arg("pass") = report.passed(), py::arg("entries") = entries);
      },
      py::arg("m"), py::arg("path"), "Compare the derived coefficients with a fixture file.");

  mod.def(
      "eval_expr", [](const std::string& text, double x) { return eval_expr(parse_expr(text), x); },
      py::arg("expr"), py::arg("x"));

  mod.def(
      "verify",
      [](unsigned m, const std::string& p, const std::string& q, std::pair<double, double> interval, double step,
         std::pair<double, double> ic_f, std::pair<double, double> ic_g, double residual_tol, double wronskian_tol) {
        NumericConfig cfg;
        cfg.a = interval.first;
        cfg.b = interval.second;
        cfg.step = step;
        cfg.f = {ic_f.first, ic_f.second};
        cfg.g = {ic_g.first, ic_g.second};
        const auto report = [&] {
          py::gil_scoped_release release;
          return basis_check(derive_lifted_ode(m), parse_expr(p), parse_expr(q), cfg,
                             Tolerances{residual_tol, wronskian_tol});
        }();
        return py::module_::import("json").attr("loads")(report_to_json(report));
      },
      py::arg("m"), py::arg("p"), py::arg("q"), py::arg("interval") = std::pair{0.0, 1.0}, py::arg("step") = 1e-3,
      py::arg("ic_f") = std::pair{1.0, 0.0}, py::arg("ic_g") = std::pair{0.0, 1.0},
      py::arg("residual_tol") = Tolerances{}.residual, py::arg("wronskian_tol") = Tolerances{}.wronskian,
      "Numerical basis check; returns the report as a dict.");
}
