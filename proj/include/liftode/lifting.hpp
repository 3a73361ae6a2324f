#pragma once

// Derivation of the monic order-(m+1) linear ODE satisfied by y = f^m when
// f solves f'' = p f' + q f.
//
// Derivatives of y are tracked as coordinates over B_i = f^(m-i) (f')^i,
// i = 0..m. Differentiating and rewriting f'' with the base equation acts
// tridiagonally on these coordinates, and the coordinate matrix of
// y, y', ..., y^(m) is lower triangular with the falling factorials
// m!/(m-k)! on its diagonal, so the relation for y^(m+1) comes out of an
// exact back-substitution that only ever divides by integers.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liftode/diffring.hpp"

namespace liftode {

/// Coordinates of a function over B_0..B_m. Always holds exactly m+1 entries.
class ModuleVector {
 public:
  /// The zero vector for power m (m >= 1).
  explicit ModuleVector(unsigned m);
  ModuleVector(unsigned m, std::vector<DiffPoly> coords);

  /// B_i itself, i.e. the i-th unit vector.
  static ModuleVector unit(unsigned m, unsigned i);

  unsigned power() const noexcept { return m_; }
  std::size_t size() const noexcept { return coords_.size(); }
  const DiffPoly& operator[](std::size_t i) const { return coords_.at(i); }
  DiffPoly& operator[](std::size_t i) { return coords_.at(i); }
  std::span<const DiffPoly> coords() const noexcept { return coords_; }
  bool is_zero() const;

  ModuleVector& operator+=(const ModuleVector& other);
  ModuleVector& operator-=(const ModuleVector& other);
  ModuleVector& operator*=(const DiffPoly& scalar);

  friend ModuleVector operator+(ModuleVector a, const ModuleVector& b) { return a += b; }
  friend ModuleVector operator-(ModuleVector a, const ModuleVector& b) { return a -= b; }
  friend ModuleVector operator*(const DiffPoly& s, ModuleVector v) { return v *= s; }
  friend bool operator==(const ModuleVector&, const ModuleVector&) = default;

 private:
  unsigned m_;
  std::vector<DiffPoly> coords_;
};

/// d/dx in coordinates:
///   w[j] = D(v[j]) + j p v[j] + (m-j+1) v[j-1] + (j+1) q v[j+1].
ModuleVector basis_step(const ModuleVector& v);

/// v_0..v_{m+1}, where v_0 = B_0 = f^m and v_{k+1} = basis_step(v_k), so v_k
/// holds the coordinates of y^(k).
std::vector<ModuleVector> derivative_tower(unsigned m);

/// m!/(m-k)!, the diagonal entry v_k[k] of the tower.
Integer falling_factorial(unsigned m, unsigned k);

/// y^(m+1) + c_m y^(m) + ... + c_1 y' + c_0 y = 0, with coeffs[k] = c_k.
struct LiftedODE {
  unsigned m = 1;
  std::vector<DiffPoly> coeffs;

  unsigned order() const noexcept { return m + 1; }
  friend bool operator==(const LiftedODE&, const LiftedODE&) = default;
};

/// Throws std::domain_error for m < 1 and std::logic_error if the tower
/// ever loses its triangular shape.
LiftedODE derive_lifted_ode(unsigned m);

/// Highest derivative order appearing in any c_k; nullopt when none does.
std::optional<unsigned> max_derivative_order(const LiftedODE& ode);

/// Plain: one "c<k> = ..." line per coefficient, k descending, preceded by
/// the equation header. LaTeX: "c_{k} = ..." lines. JSON: the coefficient
/// document { "m", "monic", "coeffs": [ { "k", "terms" } ] }.
std::string format(const LiftedODE& ode, Style style);

/// Inverse of format(ode, Style::json).
LiftedODE parse_lifted_ode_json(std::string_view text);

// Fixtures: one file per m named order_m<m>.txt, m+1 lines, line k = c_k.

std::filesystem::path fixture_path(const std::filesystem::path& dir, unsigned m);
std::vector<DiffPoly> parse_fixture(std::string_view text);
std::vector<DiffPoly> load_fixture(const std::filesystem::path& file);

struct FixtureEntry {
  unsigned k = 0;
  bool pass = false;
  /// derived c_k minus fixture c_k; zero exactly when pass is set.
  DiffPoly difference;
};

struct FixtureReport {
  unsigned m = 0;
  std::vector<FixtureEntry> entries;

  bool passed() const;
  std::size_t pass_count() const;
};

/// Exact comparison of each coefficient. Throws FixtureFormatError when the
/// fixture does not hold m+1 entries.
FixtureReport check_against_fixture(const LiftedODE& ode, std::span<const DiffPoly> fixture);
FixtureReport check_against_fixture(unsigned m, std::span<const DiffPoly> fixture);

}  // namespace liftode
