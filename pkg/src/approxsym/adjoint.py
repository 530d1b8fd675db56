"""Closed-form adjoint action ``Ad(exp(mu*v)) = exp(-mu * ad v)``.

Matrix exponentials are computed exactly from the additive Jordan-Chevalley
decomposition, which needs a rational spectrum.  Entries are finite sums
``sum_lam exp(lam*mu) * p_lam(mu)`` with rational ``lam`` and polynomials
``p_lam`` over the rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

import sympy as sp

from . import linalg
from .liealg import LieAlgebraTable, rat_text
from .symbolic import MU, as_fraction, as_rational, normalize


class NonRationalSpectrum(ValueError):
    pass


def _trim(coeffs) -> tuple:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _poly_add(a, b):
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _poly_mul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _poly_eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


class ExpNumber:
    """Exact element of ``Q[e^q : q rational]``: ``sum_q c_q * e^q``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms = {Fraction(k): Fraction(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def lift(cls, x) -> "ExpNumber":
        if isinstance(x, ExpNumber):
            return x
        return cls({0: x})

    def __add__(self, other):
        other = ExpNumber.lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return ExpNumber(out)

    __radd__ = __add__

    def __neg__(self):
        return ExpNumber({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-ExpNumber.lift(other))

    def __rsub__(self, other):
        return ExpNumber.lift(other) - self

    def __mul__(self, other):
        other = ExpNumber.lift(other)
        out: dict = {}
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return ExpNumber(out)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        try:
            return self.terms == ExpNumber.lift(other).terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def to_expr(self):
        return sum((as_rational(v) * sp.exp(as_rational(k)) for k, v in self.terms.items()),
                   sp.Integer(0))

    def __float__(self):
        return float(sp.N(self.to_expr(), 30))

    def __repr__(self):
        return f"ExpNumber({ {rat_text(k): rat_text(v) for k, v in sorted(self.terms.items())} })"


@dataclass(frozen=True)
class ExpPoly:
    """``sum_lam exp(lam*mu) * p_lam(mu)``; ``terms`` maps lam to ascending coefficients."""

    terms: tuple = ()  # sorted ((lam, coeffs), ...)

    @classmethod
    def from_dict(cls, d: Mapping) -> "ExpPoly":
        items = []
        for lam, p in d.items():
            p = _trim(Fraction(c) for c in p)
            if p:
                items.append((Fraction(lam), p))
        return cls(tuple(sorted(items)))

    @classmethod
    def constant(cls, c) -> "ExpPoly":
        return cls.from_dict({0: (c,)})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        out = self.as_dict()
        for lam, p in other.terms:
            out[lam] = _poly_add(out.get(lam, ()), p)
        return ExpPoly.from_dict(out)

    def __mul__(self, other) -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            other = ExpPoly.constant(other)
        out: dict = {}
        for a, p in self.terms:
            for b, q in other.terms:
                out[a + b] = _poly_add(out.get(a + b, ()), _poly_mul(p, q))
        return ExpPoly.from_dict(out)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(lam == 0 and len(p) <= 1 for lam, p in self.terms)

    def at(self, mu) -> ExpNumber:
        """Exact value at a rational ``mu``."""
        mu = Fraction(mu)
        return ExpNumber({lam * mu: _poly_eval(p, mu) for lam, p in self.terms})

    def derivative(self) -> "ExpPoly":
        out = {}
        for lam, p in self.terms:
            dp = tuple(i * c for i, c in enumerate(p))[1:]
            out[lam] = _poly_add(tuple(lam * c for c in p), dp)
        return ExpPoly.from_dict(out)

    def to_expr(self, mu=MU):
        total = sp.Integer(0)
        for lam, p in self.terms:
            poly = sum((as_rational(c) * mu**i for i, c in enumerate(p)), sp.Integer(0))
            total += sp.exp(as_rational(lam) * mu) * poly
        return total

    def text(self, mu: str = "mu") -> str:
        """Compact form such as ``-2*mu``, ``mu^2`` or ``exp(3*mu)``."""
        parts = []
        for lam, p in self.terms:
            for i, c in enumerate(p):
                if not c:
                    continue
                factors = []
                if i == 1:
                    factors.append(mu)
                elif i > 1:
                    factors.append(f"{mu}^{i}")
                if lam:
                    arg = mu if lam == 1 else f"-{mu}" if lam == -1 else f"{rat_text(lam)}*{mu}"
                    factors.append(f"exp({arg})")
                parts.append((c, factors))
        out = []
        for n, (c, factors) in enumerate(parts):
            mag = abs(c)
            body = "*".join(([rat_text(mag)] if mag != 1 or not factors else []) + factors)
            sign = "-" if c < 0 else "+"
            out.append(("-" if sign == "-" else "") + body if n == 0 else f" {sign} {body}")
        return "".join(out) or "0"


# -- minimal polynomial and spectrum ----------------------------------------

def minimal_polynomial(a) -> list[Fraction]:
    """Monic minimal polynomial, ascending coefficients."""
    n = len(a)
    powers = [linalg.identity(n)]
    while True:
        flat = [[x for row in p for x in row] for p in powers]
        cols = linalg.transpose(flat)
        null = linalg.nullspace(cols, len(powers))
        if null:
            v = null[0]
            lead = v[-1]
            return [x / lead for x in v]
        powers.append(linalg.matmul(powers[-1], a))


def rational_spectrum(a) -> dict[Fraction, int]:
    """Eigenvalue -> multiplicity in the minimal polynomial."""
    coeffs = minimal_polynomial(a)
    lam = sp.Symbol("lam")
    poly = sum((as_rational(c) * lam**i for i, c in enumerate(coeffs)), sp.Integer(0))
    _, factors = sp.factor_list(poly, lam)
    out = {}
    for f, mult in factors:
        p = sp.Poly(f, lam)
        if p.degree() != 1:
            raise NonRationalSpectrum(f"non-rational spectrum: factor {f}")
        c1, c0 = p.all_coeffs()
        out[as_fraction(-c0 / c1)] = mult
    return out


def _matpow(a, k):
    out = linalg.identity(len(a))
    for _ in range(k):
        out = linalg.matmul(out, a)
    return out


def jordan_chevalley(a):
    """Spectral projectors and the nilpotent part of ``a``.

    Returns ``({lam: (projector, multiplicity)}, nilpotent)``.
    """
    n = len(a)
    spectrum = rational_spectrum(a)
    blocks = []
    for lam, m in sorted(spectrum.items()):
        shifted = linalg.madd(a, linalg.identity(n), -lam)
        blocks.append((lam, m, linalg.nullspace(_matpow(shifted, m), n)))
    change = linalg.transpose([v for _, _, vs in blocks for v in vs])
    inv = linalg.inverse(change)
    projectors = {}
    start = 0
    for lam, m, vs in blocks:
        sel = linalg.zeros(n, n)
        for i in range(start, start + len(vs)):
            sel[i][i] = Fraction(1)
        projectors[lam] = (linalg.matmul(linalg.matmul(change, sel), inv), m)
        start += len(vs)
    semisimple = linalg.zeros(n, n)
    for lam, (p, _) in projectors.items():
        semisimple = linalg.madd(semisimple, p, lam)
    return projectors, linalg.madd(a, semisimple, -1)


def exact_exp(a, sign: int = 1) -> list[list[ExpPoly]]:
    """``exp(sign * mu * a)`` with ExpPoly entries."""
    n = len(a)
    projectors, nil = jordan_chevalley(linalg.as_matrix(a))
    acc: list[list[dict]] = [[{} for _ in range(n)] for _ in range(n)]
    for lam, (proj, m) in projectors.items():
        term = proj
        for k in range(m):
            scale = Fraction(sign**k, factorial(k))
            for r in range(n):
                for c in range(n):
                    if term[r][c]:
                        d = acc[r][c].setdefault(sign * lam, [Fraction(0)] * m)
                        d[k] += scale * term[r][c]
            term = linalg.matmul(nil, term)
    return [[ExpPoly.from_dict(acc[r][c]) for c in range(n)] for r in range(n)]


# -- adjoint representation ---------------------------------------------------

def ad_matrix(g: LieAlgebraTable, i: int):
    return g.ad_basis(i)


@dataclass(frozen=True)
class AdjointMatrix:
    """``entries[j][k]``: v_k-coefficient of ``Ad(exp(mu*v_i)) v_j``."""

    generator: int
    entries: tuple

    def image(self, j: int) -> tuple:
        return self.entries[j]


def adjoint(g: LieAlgebraTable, i: int) -> AdjointMatrix:
    e = exact_exp(ad_matrix(g, i), sign=-1)
    n = g.dim
    return AdjointMatrix(i, tuple(tuple(e[k][j] for k in range(n)) for j in range(n)))


def adjoint_table(g: LieAlgebraTable) -> list[AdjointMatrix]:
    return [adjoint(g, i) for i in range(g.dim)]


def apply_adjoint(m: AdjointMatrix, mu, w: Sequence) -> list:
    """``Ad(exp(mu*v_i)) w`` for symbolic or rational ``mu``, as sympy expressions."""
    mu = sp.sympify(mu)
    n = len(w)
    vals = [[m.entries[j][k].to_expr(mu) for k in range(n)] for j in range(n)]
    out = []
    for k in range(n):
        out.append(normalize(sum((sp.sympify(w[j]) * vals[j][k] for j in range(n) if w[j] != 0),
                                 sp.Integer(0))))
    return out


def apply_adjoint_exact(m: AdjointMatrix, mu, w: Sequence) -> list[ExpNumber]:
    """Exact action for rational ``mu`` and ExpNumber or rational coordinates."""
    n = len(w)
    out = [ExpNumber() for _ in range(n)]
    for j in range(n):
        if not w[j]:
            continue
        for k in range(n):
            out[k] = out[k] + ExpNumber.lift(w[j]) * m.entries[j][k].at(mu)
    return out


def lie_series(g: LieAlgebraTable, i: int, mu, w: Sequence, terms: int = 15) -> list[Fraction]:
    """Truncated series ``w - mu[v_i, w] + mu^2/2 [v_i, [v_i, w]] - ...``."""
    mu = Fraction(mu)
    cur = [Fraction(x) for x in w]
    out = list(cur)
    ei = [Fraction(int(k == i)) for k in range(g.dim)]
    for n in range(1, terms):
        cur = g.bracket(ei, cur)
        coef = (-mu) ** n / factorial(n)
        out = [a + coef * b for a, b in zip(out, cur)]
    return out


def entry_text(m: AdjointMatrix, j: int, labels: Sequence[str], mu: str = "mu") -> str:
    """``Ad(exp(mu*v_i)) v_j`` as text, diagonal term first then by degree."""
    row = m.entries[j]
    order = sorted((k for k in range(len(row)) if row[k]),
                   key=lambda k: (k != j, max((len(p) for _, p in row[k].terms), default=0), k))
    out = []
    for n, k in enumerate(order):
        e = row[k]
        txt = e.text(mu)
        if e.is_constant():
            c = e.terms[0][1][0]
            body = labels[k] if abs(c) == 1 else f"{rat_text(abs(c))}*{labels[k]}"
            neg = c < 0
        else:
            neg = txt.startswith("-") and " " not in txt
            core = txt[1:] if neg else txt
            core = f"({core})" if " " in core else core
            body = f"{core}*{labels[k]}"
        if n == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append(f" {'-' if neg else '+'} {body}")
    return "".join(out) or "0"


def _latex_entry(text: str) -> str:
    import re
    s = re.sub(r"exp\(([^)]*)\)", lambda m: "e^{" + m.group(1).replace("*", "") + "}", text)
    s = re.sub(r"v(\d+)", lambda m: r"\mathbf{v}_{" + m.group(1) + "}", s)
    s = s.replace("mu", r"\mu").replace("^2", "^{2}").replace("*", "")
    return s


def latex_table(g: LieAlgebraTable, table: list[AdjointMatrix] | None = None, split: int = 5) -> str:
    """Adjoint table as two LaTeX arrays of ``split`` columns each."""
    table = table or adjoint_table(g)
    n = g.dim
    chunks = [range(s, min(s + split, n)) for s in range(0, n, split)]
    blocks = []
    for cols in chunks:
        head = " & ".join(r"\mathbf{v}_{%d}" % (c + 1) for c in cols)
        lines = [r"\begin{array}{c|" + "c" * len(cols) + "}",
                 r"\mathrm{Ad} & " + head + r" \\ \hline"]
        for m in table:
            cells = [_latex_entry(entry_text(m, c, g.labels)) for c in cols]
            lines.append(r"\mathbf{v}_{%d} & " % (m.generator + 1) + " & ".join(cells) + r" \\")
        lines.append(r"\end{array}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
