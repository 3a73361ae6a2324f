#!/usr/bin/env python3
"""Independent check of `liftode derive --style json` against sympy.

For each m, differentiate y = f^m symbolically with unknown functions p, q,
replace f'' by p f' + q f, and solve the (m+1)x(m+1) linear system for the
coefficients of the monic relation. Then compare with the binary's output.

usage: sympy_lifted_ode.py LIFTODE_BINARY MAX_M
"""

import json
import subprocess
import sys

import sympy as sp

x = sp.Symbol("x")
p = sp.Function("p")(x)
q = sp.Function("q")(x)
F, FP = sp.symbols("F FP")


def reduce(expr):
    """Differentiate-and-substitute helper: d/dx on polynomials in F, FP."""
    return sp.expand(
        sp.diff(expr, x) + sp.diff(expr, F) * FP + sp.diff(expr, FP) * (p * FP + q * F)
    )


def derive(m):
    derivs = [F**m]
    for _ in range(m + 1):
        derivs.append(reduce(derivs[-1]))
    basis = [F ** (m - i) * FP**i for i in range(m + 1)]

    def coords(e):
        poly = sp.Poly(e, F, FP)
        return [poly.coeff_monomial(b) for b in basis]

    A = sp.Matrix([coords(derivs[k]) for k in range(m + 1)]).T
    rhs = -sp.Matrix(coords(derivs[m + 1]))
    sol = A.LUsolve(rhs)
    return [sp.expand(sp.simplify(c)) for c in sol]


def from_json(term_list):
    total = sp.Integer(0)
    for t in term_list:
        value = sp.Rational(int(t["num"]), int(t["den"]))
        for f in t["monomial"]:
            base = p if f["sym"] == "p" else q
            value *= sp.diff(base, x, f["order"]) ** f["exp"]
        total += value
    return sp.expand(total)


def main():
    binary, max_m = sys.argv[1], int(sys.argv[2])
    failures = 0
    for m in range(1, max_m + 1):
        out = subprocess.run(
            [binary, "derive", "-m", str(m), "--style", "json"],
            check=True,
            capture_output=True,
            text=True,
        ).stdout
        doc = json.loads(out)
        got = {c["k"]: from_json(c["terms"]) for c in doc["coeffs"]}
        want = derive(m)
        bad = [k for k in range(m + 1) if sp.expand(got.get(k, 0) - want[k]) != 0]
        print(f"m={m}: {'ok' if not bad else 'MISMATCH at k=' + str(bad)}")
        failures += bool(bad)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
