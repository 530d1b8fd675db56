"""Published reference values for the perturbed Harry Dym equation.

These are transcriptions of printed results, kept verbatim (including
misprints) so that reports can diff the derived results against them.
Expressions use the text grammar; ``v1..v10`` denote basis elements and
``A1..A5``, ``C1..C5``, ``a..f`` are free constants.
"""
from __future__ import annotations

import sympy as sp

from .grammar import parse
from .symbolic import normalize

LABELS = tuple(f"v{i}" for i in range(1, 11))
BASIS_SYMBOLS = tuple(sp.Symbol(name) for name in LABELS)

# (xi, tau, phi) of the exact generators as printed
GENERATORS = (
    ("1", "0", "0"),
    ("0", "1", "0"),
    ("x", "0", "u"),
    ("0", "3*t", "-1*u"),
    ("2*x^2", "0", "x*u"),
)

# generic exact generator as printed; phi is not linear in the constants
GENERIC_EXACT = ("A1 + A2*x + A3/2*x^2", "A4 + 3*A5*t", "(A2 - 1/(3*A5) + x*A3)*u")

AUXILIARY_H = "u_x*(A5 - A2) + A3*(u - x*u_x)"

# general deformation as printed
DEFORMATION = (
    "(A5 - A2)*t - A3*x*t + C4*x - C5 + C3/2*x^2",
    "C1*t + C2",
    "(-1*A3*t + C4 + C3*x + C1/3)*u",
)

COMMUTATORS = (
    ("0", "0", "v1", "0", "2*v3", "0", "0", "v6", "0", "2*v8"),
    ("0", "0", "0", "12*v2", "0", "0", "0", "0", "3*v7", "0"),
    ("-v1", "0", "0", "0", "v5", "-v6", "0", "0", "0", "v10"),
    ("0", "-12*v2", "0", "0", "0", "0", "-3*v7", "0", "0", "0"),
    ("-2*v3", "0", "-v5", "0", "0", "-2*v8", "0", "-v10", "0", "0"),
    ("0", "0", "v6", "0", "2*v8", "0", "0", "0", "0", "0"),
    ("0", "0", "0", "3*v7", "0", "0", "0", "0", "0", "0"),
    ("-v6", "0", "0", "0", "v10", "0", "0", "0", "0", "0"),
    ("0", "-3*v7", "0", "0", "0", "0", "0", "0", "0", "0"),
    ("-2*v8", "0", "-v10", "0", "0", "0", "0", "0", "0", "0"),
)

# row i, column j: Ad(exp(mu*v_i)) v_j
ADJOINT = (
    ("v1", "v2", "v3 - mu*v1", "v4", "v5 - 2*mu*v3 + mu^2*v1",
     "v6", "v7", "v8 - mu*v6", "v9", "v10 - 2*mu*v8 + mu^2*v6"),
    ("v1", "v2", "v3", "v4 - 12*mu*v2", "v5",
     "v6", "v7", "v8", "v9 - 3*mu*v7", "v10"),
    ("exp(mu)*v1", "v2", "v3", "v4", "exp(-mu)*v5",
     "exp(mu)*v6", "v7", "v8", "v9", "exp(-mu)*v10"),
    ("v1", "exp(12*mu)*v2", "v3", "v4", "v5",
     "v6", "exp(3*mu)*v7", "v8", "v9", "v10"),
    ("v1 + 2*mu*v3 + mu^2*v5", "v2", "v3 + mu*v5", "v4", "v5",
     "v6 + 2*mu*v8 + mu^2*v10", "v7", "v8 + mu + v10", "v9", "v10"),
    ("v1", "v2", "v3 - mu*v6", "v4", "v5 - 2*mu*v8",
     "v6", "v7", "v8", "v9", "v10"),
    ("v1", "v2", "v3", "v4 - 3*mu*v7", "v5",
     "v6", "v7", "v8", "v9", "v10"),
    ("v1 + mu*v6", "v2", "v3", "v4", "v5 - mu*v10",
     "v6", "v7", "v8", "v9", "v10"),
    ("v1", "v2 + 3*mu*v7", "v3", "v4", "v5",
     "v6", "v7", "v8", "v9", "v10"),
    ("v1 + 2*mu*v8", "v2", "v3 + mu*v10", "v4", "v5",
     "v6", "v7", "v8", "v9", "v10"),
)

DERIVED_SERIES = (
    tuple(range(1, 11)),
    (1, 2, 3, 5, 6, 7, 8, 10),
    (1, 3, 5, 6, 8, 10),
    (1, 3, 5, 6, 8, 10),
)
RADICAL = (2, 4, 6, 7, 8, 9, 10)
LEVI_FACTOR = (1, 3, 5)
# printed chain r(1) > r(2) > r(3) = 0
SOLVABLE_CHAIN = ((2, 4, 6, 7, 8, 9, 10), (2, 7), ())
# images of v1, v3, v5 in the reference three-dimensional algebra
ISOMORPHISM = ("A3,8", (1, -1, -1))

# one-dimensional optimal system, numbered 1..16
OPTIMAL = (
    "v8",
    "v7 + a*v8",
    "v6 + v8",
    "v6 - v7 + v8",
    "v6 + v7 + v8",
    "v2 + a*v8",
    "v2 - v6 + a*v8",
    "v2 + v6 + a*v8",
    "v1 + a*v2 + b*v7",
    "a*v1 + b*v2 + v5 + c*v6 + d*v7",
    "a*v1 + b*v2 + v3 + c*v5 + d*v7 + e*v8",
    "a*v1 + b*v3 + v4 + c*v5 + d*v6 + e*v8",
    "a*v1 + b*v3 + c*v4 + d*v5 + e*v6 + f*v8 + v9",
    "a*v1 - v2 + b*v3 + c*v4 + d*v5 + e*v6 + f*v8 + v9",
    "a*v1 + v2 + b*v3 + c*v4 + d*v5 + e*v6 + f*v8 + v9",
    "a*v1 + v2 + b*v3 + c*v4 + d*v5 + e*v6 + f*v8 + v9",
)

# (operator, first invariant, second invariant)
INVARIANTS = (
    ("v1", "t", "u"),
    ("v2", "x", "u"),
    ("v3", "t", "u/x"),
    ("v4", "x", "u*t^1/3"),
    ("v5", "t", "u/x^2"),
    ("v7 + a*v8", "-1*ln(x)/a + t", "u/x"),
    ("v6 + v8", "t", "u/(x + 1)"),
    ("v6 - v7 + v8", "ln(x + 1) + t", "u/(x + 1)"),
    ("v6 + v7 + v8", "-1*ln(x + 1) + t", "u/(x + 1)"),
    ("v2 + a*v8", "-1*ln(x)/(a*eps) + t", "u/x"),
    ("v2 - v6 + a*v8", "-1*ln(a*x - 1)/(a*eps) + t", "u/(a*x - 1)"),
    ("v2 + v6 + a*v8", "-1*ln(a*x + 1)/(a*eps) + t", "u/(a*x + 1)"),
    ("v1 + a*v2 + b*v7", "-1*b*eps*x - a*eps + t", "u"),
    ("a*v1 + b*v2 + v5 + c*v6 + d*v7",
     "(-1*d*eps - b)/sqrt(c*eps + a)*arctan(x/sqrt(c*eps + a)) + t",
     "u/(x^2 + c*eps + a)"),
)

# pair of invariants worked out in full for v7 + a*v8
WORKED_INVARIANTS = ("v7 + a*v8", "u/x", "(ln(x) - a*t)/a")


def combination(text: str) -> list:
    """Coefficients of ``v1..v10`` in a printed linear combination.

    Raises ValueError when a term is not a multiple of a basis element.
    """
    e = sp.expand(parse(text))
    coeffs = [normalize(e.coeff(s)) for s in BASIS_SYMBOLS]
    rest = normalize(e - sum(c * s for c, s in zip(coeffs, BASIS_SYMBOLS)))
    if rest != 0 or any(c.has(*BASIS_SYMBOLS) for c in coeffs):
        raise ValueError(f"not a linear combination of basis elements: {text!r}")
    return coeffs
