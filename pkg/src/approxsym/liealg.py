"""Finite-dimensional Lie algebras over the rationals.

Structure constants follow ``[v_i, v_j] = sum_k c[i][j][k] v_k``.  The
adjoint matrix of ``v_i`` has column ``j`` equal to the coordinates of
``[v_i, v_j]``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy as sp

from . import linalg
from .jet import VectorField
from .symbolic import as_fraction, normalize, symbol_sort_key


class NotClosed(ValueError):
    pass


class NotSolvable(ValueError):
    pass


class ConsistencyError(RuntimeError):
    pass


def commutator(a: VectorField, b: VectorField) -> VectorField:
    """``[a, b]`` computed componentwise, with ``eps**2 = 0``."""
    comps = [normalize(a(q) - b(p)) for p, q in zip(a.coefficients, b.coefficients)]
    return VectorField(*comps).truncated()


def _field_rows(fields: Sequence[VectorField]) -> tuple[list, list[list[Fraction]]]:
    """Coefficient vectors of polynomial fields over a shared monomial basis."""
    gens = set()
    for f in fields:
        for c in f.coefficients:
            gens |= c.free_symbols
    gens = sorted(gens, key=symbol_sort_key) or [sp.Symbol("_")]
    tables = []
    keys = set()
    for f in fields:
        entry = {}
        for slot, c in enumerate(f.coefficients):
            if c == 0:
                continue
            try:
                poly = sp.Poly(c, *gens)
            except sp.PolynomialError:
                raise NotClosed(f"non-polynomial coefficient {c}") from None
            for monom, coef in poly.terms():
                if not coef.is_Rational:
                    raise NotClosed(f"non-rational coefficient {coef}")
                entry[(slot, monom)] = as_fraction(coef)
        keys |= set(entry)
        tables.append(entry)
    keys = sorted(keys)
    return keys, [[t.get(k, Fraction(0)) for k in keys] for t in tables]


def coordinates(basis: Sequence[VectorField], target: VectorField) -> list[Fraction] | None:
    """Coordinates of ``target`` in ``basis``; None when outside the span."""
    _, rows = _field_rows(list(basis) + [target])
    cols = linalg.transpose(rows[:-1]) if basis else [[] for _ in rows[-1]]
    try:
        return linalg.solve(cols, rows[-1], len(basis))
    except linalg.Inconsistent:
        return None


@dataclass
class LieAlgebraTable:
    c: list  # c[i][j] is a dict k -> Fraction
    basis: list | None = None
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.labels:
            self.labels = [f"v{i + 1}" for i in range(self.dim)]

    @property
    def dim(self) -> int:
        return len(self.c)

    @classmethod
    def from_brackets(cls, dim: int, brackets: dict, labels=None) -> "LieAlgebraTable":
        """Abstract algebra from ``{(i, j): {k: coeff}}`` with 0-based indices."""
        c = [[{} for _ in range(dim)] for _ in range(dim)]
        for (i, j), out in brackets.items():
            out = {k: Fraction(v) for k, v in out.items() if v}
            c[i][j] = dict(out)
            c[j][i] = {k: -v for k, v in out.items()}
        table = cls(c, None, list(labels or []))
        table.check()
        return table

    def constant(self, i: int, j: int, k: int) -> Fraction:
        return self.c[i][j].get(k, Fraction(0))

    def bracket(self, a: Sequence, b: Sequence) -> list[Fraction]:
        out = [Fraction(0)] * self.dim
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                for k, v in self.c[i][j].items():
                    out[k] += ai * bj * v
        return out

    def ad(self, a: Sequence) -> list[list[Fraction]]:
        """Matrix of ``ad a`` acting on coordinate column vectors."""
        cols = [self.bracket(a, unit(self.dim, j)) for j in range(self.dim)]
        return linalg.transpose(cols)

    def ad_basis(self, i: int) -> list[list[Fraction]]:
        return self.ad(unit(self.dim, i))

    def check(self):
        """Assert antisymmetry and the Jacobi identity exactly."""
        n = self.dim
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.constant(i, j, k) != -self.constant(j, i, k):
                        raise ConsistencyError(f"antisymmetry fails at ({i},{j},{k})")
        for i, j, k in itertools.combinations(range(n), 3):
            ei, ej, ek = unit(n, i), unit(n, j), unit(n, k)
            total = [a + b + d for a, b, d in zip(
                self.bracket(self.bracket(ei, ej), ek),
                self.bracket(self.bracket(ej, ek), ei),
                self.bracket(self.bracket(ek, ei), ej))]
            if any(total):
                raise ConsistencyError(f"Jacobi fails for ({i},{j},{k})")

    def bracket_text(self, i: int, j: int) -> str:
        return vector_text([self.constant(i, j, k) for k in range(self.dim)], self.labels)

    def to_json(self) -> dict:
        return {
            "basis": [f.to_text() for f in self.basis] if self.basis else list(self.labels),
            "c": [[[[k, rat_text(v)] for k, v in sorted(self.c[i][j].items())]
                   for j in range(self.dim)] for i in range(self.dim)],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def unit(n: int, i: int) -> list[Fraction]:
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return v


def rat_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def vector_text(v: Sequence, labels: Sequence[str]) -> str:
    parts = []
    for x, name in zip(v, labels):
        if not x:
            continue
        mag = abs(x)
        coef = "" if mag == 1 else f"{rat_text(mag)}*"
        sign = "-" if x < 0 else "+"
        parts.append((sign, coef + name))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, text in parts[1:]:
        out += f" {sign} {text}"
    return out


def structure_constants(basis: Sequence[VectorField], labels=None) -> LieAlgebraTable:
    basis = list(basis)
    n = len(basis)
    keys, rows = _field_rows(basis)
    if linalg.rank(rows) < n:
        raise ValueError("basis fields are linearly dependent")
    c = [[{} for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            br = commutator(basis[i], basis[j])
            coords = coordinates(basis, br)
            if coords is None:
                raise NotClosed(f"not closed: [{i + 1},{j + 1}] = {br} is outside the span")
            c[i][j] = {k: v for k, v in enumerate(coords) if v}
            c[j][i] = {k: -v for k, v in c[i][j].items()}
    table = LieAlgebraTable(c, basis, list(labels or []))
    table.check()
    return table


# -- subspaces ---------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """Row-reduced spanning set inside an ambient space of dimension ``ambient``."""

    ambient: int
    rows: tuple = ()

    @classmethod
    def span(cls, ambient: int, vectors) -> "Subspace":
        vectors = [list(v) for v in vectors]
        red, _ = linalg.rref(vectors, ambient) if vectors else ([], [])
        return cls(ambient, tuple(tuple(r) for r in red))

    @classmethod
    def of_indices(cls, ambient: int, indices) -> "Subspace":
        return cls.span(ambient, [unit(ambient, i) for i in indices])

    @classmethod
    def whole(cls, ambient: int) -> "Subspace":
        return cls.of_indices(ambient, range(ambient))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains(self, v) -> bool:
        return linalg.in_span([list(r) for r in self.rows], v)

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.ambient, list(self.rows) + list(other.rows))

    def intersection_dim(self, other: "Subspace") -> int:
        return self.dim + other.dim - (self + other).dim

    def basis_indices(self) -> list[int] | None:
        """Indices when the subspace is spanned by ambient basis vectors."""
        out = []
        for r in self.rows:
            nz = [i for i, x in enumerate(r) if x]
            if len(nz) != 1:
                return None
            out.append(nz[0])
        return out

    def text(self, labels: Sequence[str]) -> str:
        if not self.rows:
            return "{0}"
        idx = self.basis_indices()
        if idx is not None:
            return "span{" + ", ".join(labels[i] for i in idx) + "}"
        return "span{" + ", ".join(vector_text(r, labels) for r in self.rows) + "}"


def bracket_space(g: LieAlgebraTable, a: Subspace, b: Subspace) -> Subspace:
    return Subspace.span(g.dim, [g.bracket(x, y) for x in a.rows for y in b.rows])


def derived_series(g: LieAlgebraTable, start: Subspace | None = None) -> list[Subspace]:
    """``g ⊇ [g,g] ⊇ ...`` up to and including the first repeated or zero term."""
    cur = start or Subspace.whole(g.dim)
    series = [cur]
    while cur.dim:
        nxt = bracket_space(g, cur, cur)
        series.append(nxt)
        if nxt == cur:
            break
        cur = nxt
    return series


def is_solvable(g: LieAlgebraTable, sub: Subspace | None = None) -> bool:
    return derived_series(g, sub)[-1].dim == 0


def killing_form(g: LieAlgebraTable) -> list[list[Fraction]]:
    ads = [g.ad_basis(i) for i in range(g.dim)]
    return [[linalg.trace(linalg.matmul(ads[i], ads[j])) for j in range(g.dim)]
            for i in range(g.dim)]


def is_ideal(g: LieAlgebraTable, sub: Subspace) -> bool:
    return sub.contains_space(bracket_space(g, Subspace.whole(g.dim), sub))


def is_subalgebra(g: LieAlgebraTable, sub: Subspace) -> bool:
    return sub.contains_space(bracket_space(g, sub, sub))


def radical(g: LieAlgebraTable) -> Subspace:
    """Killing-orthogonal complement of ``[g, g]``, verified to be a solvable ideal."""
    kappa = killing_form(g)
    derived = bracket_space(g, Subspace.whole(g.dim), Subspace.whole(g.dim))
    rows = [linalg.matvec(kappa, y) for y in derived.rows]
    r = Subspace.span(g.dim, linalg.nullspace(rows, g.dim) if rows else
                      [unit(g.dim, i) for i in range(g.dim)])
    if not is_ideal(g, r) or not is_solvable(g, r):
        raise ConsistencyError("radical check failed")
    return r


def subalgebra_table(g: LieAlgebraTable, sub: Subspace) -> LieAlgebraTable:
    """Structure constants of a subalgebra in the basis ``sub.rows``."""
    if not is_subalgebra(g, sub):
        raise NotClosed("not closed: subspace is not a subalgebra")
    basis = [list(r) for r in sub.rows]
    cols = linalg.transpose(basis)
    n = len(basis)
    c = [[{} for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            coords = linalg.solve(cols, g.bracket(basis[i], basis[j]), n)
            c[i][j] = {k: v for k, v in enumerate(coords) if v}
    idx = sub.basis_indices()
    labels = [g.labels[i] for i in idx] if idx else [f"w{i + 1}" for i in range(n)]
    return LieAlgebraTable(c, None, labels)


@dataclass
class LeviReport:
    subalgebra: bool
    nondegenerate: bool
    trivial_intersection: bool
    spans: bool

    @property
    def ok(self) -> bool:
        return self.subalgebra and self.nondegenerate and self.trivial_intersection and self.spans


def levi_check(g: LieAlgebraTable, s: Subspace) -> LeviReport:
    """Is ``s`` a Levi factor?  Nondegeneracy uses the Killing form of ``s`` itself."""
    sub = is_subalgebra(g, s)
    nondeg = False
    if sub and s.dim:
        nondeg = linalg.det(killing_form(subalgebra_table(g, s))) != 0
    r = radical(g)
    return LeviReport(sub, nondeg, s.intersection_dim(r) == 0, (s + r).dim == g.dim)


def solvable_chain(g: LieAlgebraTable, r: Subspace | None = None) -> list[Subspace]:
    """``r ⊇ [r, r] ⊇ ... ⊇ {0}``; ``r`` defaults to the whole algebra."""
    series = derived_series(g, r)
    if series[-1].dim:
        raise NotSolvable("not solvable: derived series stabilizes at dimension "
                          f"{series[-1].dim}")
    return series


def check_homomorphism(m, src: LieAlgebraTable, dst: LieAlgebraTable) -> bool:
    """Is the linear map with columns ``m[:, j] = image of src basis j`` an isomorphism?"""
    m = linalg.as_matrix(m)
    if len(m) != dst.dim or any(len(r) != src.dim for r in m):
        raise ValueError("map dimensions do not match")
    if src.dim != dst.dim or linalg.det(m) == 0:
        return False
    images = linalg.transpose(m)
    for i in range(src.dim):
        for j in range(i + 1, src.dim):
            lhs = linalg.matvec(m, [src.constant(i, j, k) for k in range(src.dim)])
            if lhs != dst.bracket(images[i], images[j]):
                return False
    return True


def small_rationals(height: int) -> list[Fraction]:
    out = {Fraction(p, q) for q in range(1, height + 1) for p in range(1, height + 1)}
    pos = sorted(out, key=lambda q: (q.numerator + q.denominator, q))
    return [x for q in pos for x in (q, -q)]


def search_diagonal_isomorphism(src: LieAlgebraTable, dst: LieAlgebraTable,
                                height: int = 3) -> list[Fraction] | None:
    """First diagonal isomorphism with entries of height <= ``height``."""
    if src.dim != dst.dim:
        return None
    values = small_rationals(height)
    for diag in itertools.product(values, repeat=src.dim):
        m = [[diag[i] if i == j else Fraction(0) for j in range(src.dim)] for i in range(src.dim)]
        if check_homomorphism(m, src, dst):
            return list(diag)
    return None


def diagonal(entries) -> list[list[Fraction]]:
    n = len(entries)
    return [[Fraction(entries[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


# three-dimensional reference algebras; indices are 0-based
THREE_DIMENSIONAL = {
    "3A1": {},
    "A3,1": {(1, 2): {0: 1}},
    "A3,8": {(0, 1): {0: 1}, (0, 2): {1: -2}, (1, 2): {2: 1}},
    "A3,9": {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}},
}


def reference_algebra(name: str) -> LieAlgebraTable:
    try:
        brackets = THREE_DIMENSIONAL[name]
    except KeyError:
        raise KeyError(f"unknown algebra {name!r}; known: {sorted(THREE_DIMENSIONAL)}") from None
    return LieAlgebraTable.from_brackets(3, brackets, ["w1", "w2", "w3"])
