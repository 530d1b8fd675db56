"""Invariants of one-parameter generators.

``verify_invariant`` checks ``X(I) = 0`` symbolically, treating ``eps`` as an
ordinary nonzero parameter.  ``characteristic_invariants`` integrates the
characteristic system ``dx/xi = dt/tau = du/phi`` for generators with
constant ``tau``, ``xi`` a polynomial of degree at most two in ``x`` and
``phi = (alpha + beta*x)*u``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

import sympy as sp

from . import reference
from .grammar import parse, to_text
from .jet import VectorField
from .symbolic import (
    EPS, T, U, X, evaluate_at, normalize, random_rational, symbol_sort_key,
)


class NotInCatalog(ValueError):
    pass


@dataclass(frozen=True)
class InvariantPair:
    first: sp.Expr
    second: sp.Expr

    def text(self) -> tuple[str, str]:
        return to_text(self.first), to_text(self.second)


def verify_invariant(vf: VectorField, inv, relaxed: bool = False) -> bool:
    """``X(I) == 0``; with ``relaxed`` only the eps**0 and eps**1 parts must vanish."""
    inv = sp.sympify(inv)
    value = normalize(vf.xi * sp.diff(inv, X) + vf.tau * sp.diff(inv, T) + vf.phi * sp.diff(inv, U))
    if value == 0:
        return True
    if relaxed:
        series = sp.series(value, EPS, 0, 2).removeO()
        return all(normalize(series.coeff(EPS, k)) == 0 for k in (0, 1))
    return False


def _power(base, exponent):
    exponent = normalize(exponent)
    if exponent == 0:
        return sp.Integer(1)
    if exponent.is_Rational:
        return base**exponent
    return sp.exp(exponent * sp.log(base))


def _integrals(xi, alpha, beta):
    """``(G, g)`` with ``G' = 1/xi`` and ``g'/g = (alpha + beta*x)/xi``."""
    poly = sp.Poly(xi, X)
    deg = poly.degree()
    if deg == 0:
        k = xi
        return X / k, sp.exp(normalize((alpha * X + beta * X**2 / 2) / k))
    if deg == 1:
        kappa, prim = poly.primitive()
        l1, l0 = prim.all_coeffs()
        ell = prim.as_expr()
        G = sp.log(ell) / (kappa * l1)
        expo = normalize((alpha - beta * l0 / l1) / (kappa * l1))
        return G, sp.exp(normalize(beta * X / (kappa * l1))) * _power(ell, expo)
    lead = poly.LC()
    monic = sp.Poly(normalize(xi / lead), X)
    _, p, s = monic.all_coeffs()
    roots = sp.roots(monic)
    rational = all(not normalize(r).has(sp.Pow) or normalize(r).is_Rational
                   for r in roots) and all(not sp.sympify(r).has(sp.I) for r in roots)
    rational = rational and not any(isinstance(a, sp.Pow) and not a.exp.is_Integer
                                    for r in roots for a in sp.preorder_traversal(r))
    if rational and len(roots) == 1:
        (r,) = roots
        G = -1 / (lead * (X - r))
        cr = alpha + beta * r
        return G, _power(X - r, beta / lead) * sp.exp(normalize(-cr / (lead * (X - r))))
    if rational and len(roots) == 2:
        r1, r2 = roots
        G = (sp.log(X - r1) - sp.log(X - r2)) / (lead * (r1 - r2))
        e1 = normalize((alpha + beta * r1) / (lead * (r1 - r2)))
        e2 = normalize((alpha + beta * r2) / (lead * (r2 - r1)))
        return G, _power(X - r1, e1) * _power(X - r2, e2)
    shift = normalize(p / 2)
    disc = normalize(s - p**2 / 4)
    if disc.is_number and disc < 0:
        raise NotInCatalog("characteristic system not in catalog: real irrational roots")
    y = X + shift
    root = sp.sqrt(disc)
    arc = sp.atan(normalize(y / root))
    G = arc / (lead * root)
    g = _power(normalize(y**2 + disc), beta / (2 * lead)) * sp.exp(
        normalize((alpha - beta * shift) / (lead * root)) * arc)
    return G, g


def characteristic_invariants(vf: VectorField) -> InvariantPair:
    xi, tau, phi = vf.coefficients
    hint = " (verify_invariant still applies)"
    if tau.has(X, T, U) or xi.has(T, U):
        raise NotInCatalog("characteristic system not in catalog: tau must be constant "
                           "and xi a function of x" + hint)
    c = normalize(phi / U)
    if c.has(U, T):
        raise NotInCatalog("characteristic system not in catalog: phi must be linear in u" + hint)
    try:
        xi_poly = sp.Poly(xi, X) if xi != 0 else None
        c_poly = sp.Poly(c, X)
    except sp.PolynomialError:
        raise NotInCatalog("characteristic system not in catalog: non-polynomial coefficients"
                           + hint) from None
    if (xi_poly and xi_poly.degree() > 2) or c_poly.degree() > 1:
        raise NotInCatalog("characteristic system not in catalog: degree too high" + hint)
    alpha = c_poly.coeff_monomial(1)
    beta = c_poly.coeff_monomial(X)
    if xi == 0:
        if tau == 0:
            raise NotInCatalog("characteristic system not in catalog: xi = tau = 0" + hint)
        return InvariantPair(X, normalize(U * sp.exp(normalize(-c * T / tau))))
    G, g = _integrals(xi, alpha, beta)
    first = T if tau == 0 else normalize(T - tau * G)
    return InvariantPair(first, normalize(U / g))


def independent(pair: InvariantPair, rng: random.Random | None = None, points: int = 5) -> bool:
    """Jacobian of the pair in (x, t, u) has rank 2 at random rational points."""
    rng = rng or random.Random(0)
    syms = sorted((pair.first.free_symbols | pair.second.free_symbols | {X, T, U}),
                  key=symbol_sort_key)
    jac = [[sp.diff(f, v) for v in (X, T, U)] for f in (pair.first, pair.second)]
    done = tries = 0
    while done < points and tries < 50 * points:
        tries += 1
        point = {s: random_rational(rng) for s in syms}
        try:
            m = [[complex(evaluate_at(e, point)) for e in row] for row in jac]
        except (ZeroDivisionError, ValueError, TypeError):
            continue
        if any(v != v or abs(v) == float("inf") for row in m for v in row):
            continue
        minors = [m[0][i] * m[1][j] - m[0][j] * m[1][i] for i, j in ((0, 1), (0, 2), (1, 2))]
        if max(abs(v) for v in minors) < 1e-12:
            return False
        done += 1
    return done == points


def generator(text: str, basis) -> VectorField:
    """Field named by a combination of ``v1..v10`` in ``basis``."""
    out = VectorField()
    for coef, vf in zip(reference.combination(text), basis):
        if coef != 0:
            out = out + coef * vf
    return out


@dataclass
class InvariantRow:
    operator: str
    field: VectorField
    published: InvariantPair | None
    published_ok: bool | None
    derived: InvariantPair | None
    derived_ok: bool | None
    note: str = ""

    @property
    def status(self) -> str:
        if self.published is not None and self.published_ok:
            return "pass"
        if self.derived_ok:
            return "replaced" if self.published is not None else "pass"
        return "fail"


def invariant_row(operator: str, basis, printed=None) -> InvariantRow:
    vf = generator(operator, basis)
    published = ok = None
    if printed is not None:
        published = InvariantPair(normalize(parse(printed[0])), normalize(parse(printed[1])))
        ok = verify_invariant(vf, published.first) and verify_invariant(vf, published.second)
    derived = derived_ok = None
    note = ""
    try:
        derived = characteristic_invariants(vf)
        derived_ok = (verify_invariant(vf, derived.first) and verify_invariant(vf, derived.second)
                      and independent(derived))
    except NotInCatalog as exc:
        note = str(exc)
    return InvariantRow(operator, vf, published, ok, derived, derived_ok, note)


def invariant_table(basis, rows=reference.INVARIANTS) -> list[InvariantRow]:
    return [invariant_row(op, basis, (a, b)) for op, a, b in rows]


def table_text(rows: list[InvariantRow]) -> str:
    lines = []
    for row in rows:
        pub = row.published.text() if row.published else ("-", "-")
        der = row.derived.text() if row.derived else ("out of catalog", "")
        lines.append(f"{row.operator} | {pub[0]} | {pub[1]} | {row.status}")
        if row.derived and (not row.published_ok or row.published is None):
            lines.append(f"  derived | {der[0]} | {der[1]}")
    return "\n".join(lines) + "\n"


def _latex(e) -> str:
    return sp.latex(e).replace("\\operatorname{atan}", "\\arctan").replace("\\log", "\\ln")


def table_latex(rows: list[InvariantRow]) -> str:
    lines = [r"\begin{tabular}{llll}", r"Operator & Invariant 1 & Invariant 2 & Status \\ \hline"]
    for row in rows:
        pair = row.published if row.published_ok or row.derived is None else row.derived
        op = row.operator.replace("*", "")
        cells = [f"${op}$", f"${_latex(pair.first)}$" if pair else "",
                 f"${_latex(pair.second)}$" if pair else "", row.status]
        lines.append(" & ".join(cells) + r" \\")
    lines.append(r"\end{tabular}")
    return "\n".join(lines) + "\n"
