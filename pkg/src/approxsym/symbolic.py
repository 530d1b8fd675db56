"""Exact expression engine.

Expressions are sympy trees over exact rationals.  This module fixes the
symbol conventions (independent variables ``x, t``, dependent variable ``u``,
jet coordinates ``u_x, u_xt, ...``, the perturbation ``eps`` and free
parameters), the canonical form used for every equality test, and the
first-order truncation in ``eps``.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import sympy as sp

X, T, U = sp.symbols("x t u")
EPS = sp.Symbol("eps")
MU = sp.Symbol("mu")

INDEPENDENT = (X, T)
KERNELS = (sp.exp, sp.log, sp.atan)

_JET_RE = re.compile(r"^u_([xt]+)$")


class NotTruncatable(ValueError):
    """Raised when an expression is not polynomial in ``eps``."""


class SubstitutionError(ZeroDivisionError):
    pass


def jet(index: str) -> sp.Symbol:
    """Jet coordinate ``u_J`` for a multi-index over ``{x, t}``.

    The index is canonicalized so that all ``x`` come before all ``t``.
    An empty index returns ``u`` itself.
    """
    if not index:
        return U
    if set(index) - {"x", "t"}:
        raise ValueError(f"bad multi-index {index!r}")
    return sp.Symbol("u_" + "x" * index.count("x") + "t" * index.count("t"))


def jet_index(sym) -> str | None:
    """Multi-index of a jet coordinate, ``""`` for ``u`` and None otherwise."""
    if sym == U:
        return ""
    if not isinstance(sym, sp.Symbol):
        return None
    m = _JET_RE.match(sym.name)
    if m is None:
        return None
    idx = m.group(1)
    canonical = "x" * idx.count("x") + "t" * idx.count("t")
    return canonical if canonical == idx else None


def symbol_kind(sym: sp.Symbol) -> str:
    if sym in INDEPENDENT:
        return "independent"
    if sym == U:
        return "dependent"
    if sym == EPS:
        return "perturbation"
    if jet_index(sym):
        return "jet"
    return "parameter"


def jet_symbols(e) -> list[sp.Symbol]:
    """Jet coordinates (order >= 1) occurring in ``e``, sorted canonically."""
    found = [s for s in sp.sympify(e).free_symbols if jet_index(s)]
    return sorted(found, key=lambda s: (len(jet_index(s)), jet_index(s)))


def symbol_sort_key(sym: sp.Symbol):
    """Fixed total order: parameters, eps, x, t, u, jets by (length, index)."""
    kind = symbol_kind(sym)
    if kind == "parameter":
        return (0, 0, sym.name)
    if kind == "perturbation":
        return (1, 0, "")
    if kind == "independent":
        return (2, INDEPENDENT.index(sym), "")
    if kind == "dependent":
        return (3, 0, "")
    idx = jet_index(sym)
    return (4, len(idx), idx)


# -- canonical form ---------------------------------------------------------

def _is_kernel(e) -> bool:
    if isinstance(e, KERNELS):
        return True
    return isinstance(e, sp.Pow) and not e.exp.is_Integer


def _normalize_inner(e):
    if e.is_Atom:
        return e
    if isinstance(e, KERNELS):
        return e.func(normalize(e.args[0]))
    if isinstance(e, sp.Pow) and not e.exp.is_Integer:
        return sp.Pow(normalize(e.base), e.exp)
    return e.func(*[_normalize_inner(a) for a in e.args])


def _is_polynomial(e) -> bool:
    """Only +, * and positive integer powers of symbols and rationals."""
    for node in sp.preorder_traversal(e):
        if node.is_Symbol or node.is_Rational or node.is_Add or node.is_Mul:
            continue
        if node.is_Pow and node.exp.is_Integer and node.exp > 0:
            continue
        return False
    return True


def normalize(e):
    """Canonical form: a single reduced fraction of expanded polynomials.

    Kernel arguments (``exp``, ``ln``, ``arctan``, fractional powers) are
    normalized recursively and the kernels are then treated as opaque
    generators.
    """
    e = sp.sympify(e)
    if e.is_Rational or e.is_Symbol:
        return e
    if _is_polynomial(e):
        # same result as cancel, much cheaper
        return sp.expand(e)
    out = sp.cancel(_normalize_inner(e))
    if not kernels(out):
        return out
    # with kernels one cancel pass is not always a fixed point
    for _ in range(6):
        nxt = sp.cancel(_normalize_inner(out))
        if nxt == out:
            break
        out = nxt
    return out


def diff(e, s):
    return normalize(sp.diff(sp.sympify(e), s))


def _has_singularity(e) -> bool:
    return e.has(sp.zoo, sp.nan, sp.oo, -sp.oo)


def substitute(e, bindings: Mapping):
    """Simultaneous substitution followed by normalization."""
    e = normalize(e)
    bindings = {sp.sympify(k): sp.sympify(v) for k, v in bindings.items()}
    _, den = sp.fraction(e)
    if den != 1 and normalize(den.xreplace(bindings)) == 0:
        raise SubstitutionError(f"substitution makes denominator {den} vanish")
    out = e.xreplace(bindings)
    if _has_singularity(out):
        raise SubstitutionError("substitution introduced a division by zero")
    out = normalize(out)
    if _has_singularity(out):
        raise SubstitutionError("substitution introduced a division by zero")
    return out


def is_zero(e) -> bool:
    """Exact for rational functions; structural when kernels are present."""
    return normalize(e) == 0


def kernels(e) -> set:
    return {k for k in sp.preorder_traversal(sp.sympify(e)) if _is_kernel(k)}


def is_rational_class(e) -> bool:
    return not kernels(e)


# -- first-order truncation --------------------------------------------------

@dataclass(frozen=True)
class EpsTruncated:
    """``order0 + eps*order1`` in the quotient ring where ``eps**2 = 0``."""

    order0: sp.Expr
    order1: sp.Expr

    def __add__(self, other: "EpsTruncated") -> "EpsTruncated":
        return EpsTruncated(normalize(self.order0 + other.order0),
                            normalize(self.order1 + other.order1))

    def __sub__(self, other: "EpsTruncated") -> "EpsTruncated":
        return EpsTruncated(normalize(self.order0 - other.order0),
                            normalize(self.order1 - other.order1))

    def __mul__(self, other: "EpsTruncated") -> "EpsTruncated":
        return EpsTruncated(
            normalize(self.order0 * other.order0),
            normalize(self.order0 * other.order1 + self.order1 * other.order0),
        )

    def to_expr(self):
        return normalize(self.order0 + EPS * self.order1)

    def is_zero(self) -> bool:
        return self.order0 == 0 and self.order1 == 0


def eps_truncate(e) -> EpsTruncated:
    """Coefficients of ``eps**0`` and ``eps**1``; higher powers dropped."""
    e = normalize(e)
    for k in kernels(e):
        if k.has(EPS):
            raise NotTruncatable(f"not truncatable: eps inside {k}")
    num, den = sp.fraction(e)
    if den.has(EPS):
        raise NotTruncatable("not truncatable: eps in a denominator")
    poly = sp.Poly(num, EPS)
    c0 = poly.coeff_monomial(1)
    c1 = poly.coeff_monomial(EPS)
    return EpsTruncated(normalize(c0 / den), normalize(c1 / den))


# -- randomized checks -------------------------------------------------------

def random_rational(rng: random.Random, height: int = 9) -> sp.Rational:
    q = rng.randint(1, height)
    p = rng.randint(-height, height)
    return sp.Rational(p, q)


def evaluate_at(e, point: Mapping, digits: int = 40):
    """Value of ``e`` at a point; exact when ``e`` is rational-class."""
    val = sp.sympify(e).xreplace({sp.sympify(k): v for k, v in point.items()})
    if val.free_symbols:
        raise ValueError(f"point does not bind {val.free_symbols}")
    if not val.is_Rational:
        val = sp.N(val, digits)
    return val


def find_witness(e, rng: random.Random | None = None, trials: int = 20,
                 symbols: Iterable | None = None):
    """Random rational point where ``e`` is visibly nonzero, or None.

    Points where the expression is singular are resampled.
    """
    rng = rng or random.Random(0)
    e = normalize(e)
    syms = sorted(set(symbols or ()) | e.free_symbols, key=symbol_sort_key)
    exact = is_rational_class(e)
    done = 0
    attempts = 0
    while done < trials and attempts < 20 * trials:
        attempts += 1
        point = {s: random_rational(rng) for s in syms}
        try:
            val = evaluate_at(e, point)
        except (ZeroDivisionError, ValueError):
            continue
        if _has_singularity(val):
            continue
        done += 1
        if exact:
            if val != 0:
                return point
        elif abs(complex(val)) > 1e-25:
            return point
    return None


def probably_zero(e, rng: random.Random | None = None, trials: int = 20) -> bool:
    return find_witness(e, rng, trials) is None


def as_fraction(q) -> Fraction:
    q = sp.sympify(q)
    if not q.is_Rational:
        raise ValueError(f"{q} is not rational")
    return Fraction(int(q.p), int(q.q))


def as_rational(q) -> sp.Rational:
    q = Fraction(q)
    return sp.Rational(q.numerator, q.denominator)
