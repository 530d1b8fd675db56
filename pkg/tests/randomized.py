"""Seeded generators for the randomized property checks."""
import random
from fractions import Fraction

import sympy as sp

from approxsym.jet import VectorField
from approxsym.symbolic import EPS, T, U, X, jet

ATOMS = (X, T, U, EPS, sp.Symbol("a"), jet("x"), jet("xx"), jet("t"))


def rational(rng: random.Random, height: int = 6) -> sp.Rational:
    return sp.Rational(rng.randint(-height, height), rng.randint(1, height))


def poly(rng: random.Random, variables, degree: int = 2, terms: int = 3):
    out = sp.Integer(0)
    for _ in range(rng.randint(1, terms)):
        mono = sp.Integer(1)
        for _ in range(rng.randint(0, degree)):
            mono *= rng.choice(variables)
        out += rational(rng) * mono
    return out


def expr(rng: random.Random, depth: int = 3):
    """Random expression over the grammar, kernels included."""
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(ATOMS) if rng.random() < 0.7 else rational(rng)
    kind = rng.choice(["+", "+", "*", "*", "/", "^", "exp", "ln", "arctan", "sqrt"])
    a = expr(rng, depth - 1)
    if kind == "+":
        return a + expr(rng, depth - 1)
    if kind == "*":
        return a * expr(rng, depth - 1)
    if kind == "/":
        b = expr(rng, depth - 1)
        return a / b if b != 0 else a
    if kind == "^":
        if a == 0:
            return a
        powers = [2, 3, -1] + ([sp.Rational(1, 2), sp.Rational(2, 3)] if a.free_symbols else [])
        return a ** rng.choice(powers)
    if kind in ("exp", "ln", "arctan", "sqrt") and not a.free_symbols:
        a += rng.choice(ATOMS)
    if kind == "ln":
        return sp.log(1 + a**2)
    return {"exp": sp.exp, "arctan": sp.atan, "sqrt": lambda e: sp.sqrt(1 + e**2)}[kind](a)


def field(rng: random.Random) -> VectorField:
    """Polynomial point field; phi affine in u."""
    xt = (X, T)
    return VectorField(poly(rng, xt), poly(rng, xt),
                       poly(rng, xt) * U + poly(rng, xt, degree=1))


def eps_poly(rng: random.Random):
    """Polynomial in eps (degree up to 3) with jet-dependent coefficients."""
    return sum((poly(rng, (X, U, jet("x"))) * EPS**k for k in range(rng.randint(1, 4))),
               sp.Integer(0))


def fraction(rng: random.Random, height: int = 9) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def small_field(rng: random.Random) -> VectorField:
    """Cheaper field for bulk checks: fewer terms, phi affine in u."""
    xt = (X, T)
    return VectorField(poly(rng, xt, 2, 2), poly(rng, xt, 2, 2),
                       poly(rng, xt, 1, 2) * U + poly(rng, xt, 1, 2))
