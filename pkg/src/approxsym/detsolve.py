"""Determining equations for exact and first-order approximate symmetries.

The unknown coefficients of a generator are expanded over a finite
polynomial ansatz, so the determining equations become a linear system over
the rationals which is solved exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import sympy as sp

from . import linalg
from .grammar import parse, to_text
from .jet import VectorField, apply_prolonged, jet_order, prolong, total_derivative
from .symbolic import (
    EPS, T, U, X, EpsTruncated, as_fraction, as_rational, eps_truncate, jet,
    jet_index, jet_symbols, normalize, symbol_kind, symbol_sort_key,
)


class NotEvolution(ValueError):
    pass


class NotExactSymmetry(ValueError):
    pass


class UnstableSymmetry(ValueError):
    pass


@dataclass(frozen=True)
class PerturbedPDE:
    """``F0 + eps*F1 = 0`` with ``F0`` of evolution type in ``u_t``."""

    F0: sp.Expr
    F1: sp.Expr
    jet_order: int
    name: str = ""

    @classmethod
    def from_text(cls, f0: str, f1: str = "0", name: str = "") -> "PerturbedPDE":
        F0, F1 = normalize(parse(f0)), normalize(parse(f1))
        if F0.has(EPS) or F1.has(EPS):
            raise ValueError("F0 and F1 must not contain eps")
        order = max(jet_order(F0), jet_order(F1), 1)
        return cls(F0, F1, order, name)

    @classmethod
    def harry_dym(cls) -> "PerturbedPDE":
        return cls.from_text("u_t + 1/2*u^3*u_xxx", "u_x", name="harry-dym")

    def evolution_rhs(self) -> sp.Expr:
        """``G`` in ``u_t = G`` solved from ``F0 = 0``."""
        ut = jet("t")
        F0 = sp.expand(self.F0)
        coef = normalize(sp.diff(F0, ut))
        rest = normalize(F0 - coef * ut)
        if coef == 0 or coef.has(ut) or any("t" in jet_index(s) for s in jet_symbols(coef)) \
                or any("t" in jet_index(s) for s in jet_symbols(rest)):
            raise NotEvolution("not an evolution equation: cannot solve F0 = 0 for u_t")
        return normalize(-rest / coef)

    def perturbed_rhs(self) -> sp.Expr:
        """``G0 + eps*G1`` in ``u_t = ...`` solved from ``F0 + eps*F1 = 0``."""
        if any("t" in jet_index(s) for s in jet_symbols(self.F1)):
            raise NotEvolution("perturbation must not contain t-derivatives")
        ut = jet("t")
        coef = normalize(sp.diff(sp.expand(self.F0), ut))
        return normalize(self.evolution_rhs() - EPS * self.F1 / coef)

    def to_text(self) -> str:
        return f"{to_text(self.F0)} + eps*({to_text(self.F1)})"


def on_shell(e, rhs):
    """Eliminate every jet coordinate containing ``t`` using ``u_t = rhs``.

    Differential consequences are substituted too, so the result involves
    only x-derivatives of u.
    """
    e = normalize(e)
    targets = [s for s in jet_symbols(e) if "t" in jet_index(s)]
    if not targets:
        return e
    cache: dict[str, sp.Expr] = {}

    def value(idx: str):
        # idx canonical: x^k t^l with l >= 1
        if idx in cache:
            return cache[idx]
        if idx == "t":
            v = rhs
        elif idx.endswith("tt") or (idx.count("t") >= 2):
            parent = value(idx[:-1])
            v = _on_shell_dt(parent, rhs)
        else:
            # x^k t with k >= 1: D_x of u_{x^(k-1) t}
            v = total_derivative(value(idx[1:]), "x", 10**6)
        cache[idx] = v
        return v

    bindings = {s: value(jet_index(s)) for s in targets}
    return normalize(e.xreplace(bindings))


def _on_shell_dt(e, rhs):
    """``D_t e`` restricted to solutions, for ``e`` free of t-derivatives."""
    out = sp.diff(e, T)
    for s in [U] + jet_symbols(e):
        if not e.has(s):
            continue
        idx = jet_index(s)
        d = rhs
        for _ in range(len(idx)):
            d = total_derivative(d, "x", 10**6)
        out += d * sp.diff(e, s)
    return normalize(out)


# -- ansatz ------------------------------------------------------------------

@dataclass(frozen=True)
class Ansatz:
    """Polynomial ansatz for ``(xi, tau, phi)``.

    ``xi`` and ``tau`` have joint degree ``xt_degree`` in (x, t) and degree
    ``u_degree`` in u; ``phi`` has joint degree ``phi_xt_degree`` in (x, t)
    and degree ``phi_u_degree`` in u.
    """

    xt_degree: int = 3
    u_degree: int = 0
    phi_xt_degree: int = 2
    phi_u_degree: int = 1

    def enlarged(self, by: int = 1) -> "Ansatz":
        return Ansatz(self.xt_degree + by, self.u_degree + by,
                      self.phi_xt_degree + by, self.phi_u_degree + by)

    @staticmethod
    def _monomials(xt_deg: int, u_deg: int) -> list:
        out = []
        for k in range(u_deg + 1):
            for d in range(xt_deg + 1):
                for i in range(d, -1, -1):
                    out.append(X**i * T**(d - i) * U**k)
        return out

    def unknowns(self) -> list[tuple[str, sp.Expr]]:
        """Ordered (component, monomial) pairs; phi first, then xi, tau."""
        out = [("phi", m) for m in self._monomials(self.phi_xt_degree, self.phi_u_degree)]
        out += [("xi", m) for m in self._monomials(self.xt_degree, self.u_degree)]
        out += [("tau", m) for m in self._monomials(self.xt_degree, self.u_degree)]
        return out

    def fields(self) -> list[VectorField]:
        out = []
        for comp, m in self.unknowns():
            out.append(VectorField(**{comp: m}))
        return out

    def field(self, coeffs) -> VectorField:
        acc = {"xi": 0, "tau": 0, "phi": 0}
        for (comp, m), c in zip(self.unknowns(), coeffs):
            acc[comp] += as_rational(c) * m if isinstance(c, (int, Fraction)) else c * m
        return VectorField(**acc)

    def coordinates(self, vf: VectorField) -> list[Fraction] | None:
        """Ansatz coefficients of a rational polynomial field, None if outside."""
        unknowns = self.unknowns()
        out = []
        used = {"xi": set(), "tau": set(), "phi": set()}
        for comp, m in unknowns:
            poly = sp.Poly(getattr(vf, comp), X, T, U)
            out.append(as_fraction(poly.coeff_monomial(m)))
            used[comp].add(sp.Poly(m, X, T, U).monoms()[0])
        for comp in ("xi", "tau", "phi"):
            expr = getattr(vf, comp)
            if expr == 0:
                continue
            for monom, _ in sp.Poly(expr, X, T, U).terms():
                if monom not in used[comp]:
                    return None
        return out


@dataclass
class LinearSystem:
    unknowns: list[str]
    rows: list[dict[int, Fraction]]
    provenance: list[sp.Expr]
    rhs: list[Fraction] = field(default_factory=list)

    def matrix(self) -> list[list[Fraction]]:
        n = len(self.unknowns)
        out = []
        for row in self.rows:
            dense = [Fraction(0)] * n
            for k, v in row.items():
                dense[k] = v
            out.append(dense)
        return out

    def dump(self) -> str:
        lines = []
        for mono, row, *b in zip(self.provenance, self.rows, self.rhs or [None] * len(self.rows)):
            terms = []
            for k in sorted(row):
                c = row[k]
                sign = "-" if c < 0 else "+"
                terms.append(f"{sign} {abs(c)}*{self.unknowns[k]}")
            body = " ".join(terms).lstrip("+ ") if terms else "0"
            if b and b[0] is not None and b[0] != 0:
                body += f" = {b[0]}"
            lines.append(f"{to_text(mono)} : {body}")
        return "\n".join(lines)


@dataclass
class GeneratorBasis:
    fields: list[VectorField]
    tags: list[str]

    def __len__(self) -> int:
        return len(self.fields)


def exact_residual(vf: VectorField, pde: PerturbedPDE):
    if vf.coefficients and any(c.has(EPS) for c in vf.coefficients):
        raise ValueError("exact_residual expects an eps-free field")
    px = prolong(vf, pde.jet_order)
    return on_shell(apply_prolonged(px, pde.F0), pde.evolution_rhs())


def approximate_residual(vf: VectorField, pde: PerturbedPDE) -> EpsTruncated:
    """Order-eps determining equation of ``X = X0 + eps*X1`` (truncated)."""
    px = prolong(vf.truncated(), pde.jet_order)
    value = apply_prolonged(px, pde.F0 + EPS * pde.F1)
    return eps_truncate(on_shell(value, pde.perturbed_rhs()))


def _coefficient_rows(exprs: list, extra_gens=()) -> tuple[list[sp.Expr], list[dict[int, Fraction]]]:
    """Coefficients of every monomial in the (numerators of the) expressions."""
    exprs = [normalize(e) for e in exprs]
    dens = [sp.fraction(e)[1] for e in exprs]
    common = sp.lcm_list(dens) if any(d != 1 for d in dens) else sp.Integer(1)
    nums = [normalize(e * common) for e in exprs]
    gens = set()
    for n in nums:
        gens |= n.free_symbols
    gens |= set(extra_gens)
    gens = sorted(gens, key=symbol_sort_key)
    table: dict[tuple, dict[int, Fraction]] = {}
    for k, n in enumerate(nums):
        if n == 0:
            continue
        try:
            terms = sp.Poly(n, *gens).terms()
        except sp.PolynomialError:
            raise ValueError("residual is not polynomial in x, t, u and the jets; "
                             "the polynomial ansatz cannot split it") from None
        for monom, c in terms:
            table.setdefault(monom, {})[k] = as_fraction(c)
    keys = sorted(table)
    monos = [sp.Mul(*(g**p for g, p in zip(gens, key))) for key in keys]
    return monos, [table[key] for key in keys]


@lru_cache(maxsize=32)
def _residuals(pde: PerturbedPDE, ansatz: Ansatz) -> tuple:
    return tuple(exact_residual(f, pde) for f in ansatz.fields())


def assemble(pde: PerturbedPDE, ansatz: Ansatz, sources=()) -> LinearSystem:
    """Coefficient system of the exact determining equation over ``ansatz``.

    ``sources`` are extra expressions whose coefficients are appended as
    additional columns (used for inhomogeneous deformation equations).
    """
    residuals = list(_residuals(pde, ansatz)) + list(sources)
    monos, rows = _coefficient_rows(residuals)
    names = [f"{comp}[{to_text(m)}]" for comp, m in ansatz.unknowns()]
    names += [f"src{i}" for i in range(len(sources))]
    return LinearSystem(names, rows, monos)


def _basis_from_nullspace(vectors, ansatz: Ansatz) -> list[VectorField]:
    """Primitive integer fields ordered by (nonzero entries, degree, first column).

    Entries are read in xi, tau, phi column order, which also fixes the sign.
    """
    unknowns = ansatz.unknowns()
    order = [i for comp in ("xi", "tau", "phi")
             for i, (c, _) in enumerate(unknowns) if c == comp]
    degree = [sp.Poly(m, X, T, U).total_degree() for _, m in unknowns]
    keyed = []
    for v in vectors:
        w = linalg.primitive([v[i] for i in order])
        full = [0] * len(v)
        for i, x in zip(order, w):
            full[i] = x
        nnz = sum(1 for x in w if x)
        deg = max(degree[i] for i in order if full[i])
        first = next(k for k, x in enumerate(w) if x)
        keyed.append(((nnz, deg, first, [-abs(x) for x in w]), full))
    keyed.sort(key=lambda kv: kv[0])
    return [ansatz.field(v) for _, v in keyed]


def solve_exact(pde: PerturbedPDE, ansatz: Ansatz = Ansatz()) -> GeneratorBasis:
    system = assemble(pde, ansatz)
    null = linalg.nullspace(system.matrix(), len(system.unknowns))
    fields = _basis_from_nullspace(null, ansatz)
    return GeneratorBasis(fields, ["exact"] * len(fields))


def auxiliary_H(vf: VectorField, pde: PerturbedPDE):
    """Order-eps defect of an exact symmetry acting on the perturbed equation."""
    px = prolong(vf, pde.jet_order)
    value = on_shell(apply_prolonged(px, pde.F0 + EPS * pde.F1), pde.perturbed_rhs())
    trunc = eps_truncate(value)
    if trunc.order0 != 0:
        raise NotExactSymmetry("X0 is not an exact symmetry")
    return trunc.order1


@dataclass
class Deformation:
    """Affine solution set ``particular + span(homogeneous)`` for ``X1``."""

    particular: VectorField
    homogeneous: list[VectorField]
    ansatz: Ansatz

    def contains(self, vf: VectorField) -> bool:
        diff = self.ansatz.coordinates(vf - self.particular)
        if diff is None:
            return False
        basis = [self.ansatz.coordinates(h) for h in self.homogeneous]
        return linalg.in_span(basis, diff)

    def membership_by_parameter(self, vf: VectorField) -> dict:
        """Check a parametrized family term by term.

        Both ``vf`` and the particular solution are split into the part free
        of parameters and the coefficient of each parameter; the differences
        must lie in the homogeneous span.  Returns ``{name: bool}`` with
        ``"1"`` for the parameter-free part.
        """
        params = sorted(set(_parameters(vf)) | set(_parameters(self.particular)),
                        key=symbol_sort_key)
        c0, parts = _split_linear(vf, params)
        p0, pparts = _split_linear(self.particular, params)
        out = {"1": self.contains(c0 - p0 + self.particular)}
        for (p, piece), (_, ppiece) in zip(parts, pparts):
            out[p.name] = self.contains(piece - ppiece + self.particular)
        return out


def _parameters(vf: VectorField) -> list[sp.Symbol]:
    syms = set()
    for c in vf.coefficients:
        syms |= c.free_symbols
    return sorted((s for s in syms if symbol_kind(s) == "parameter"), key=symbol_sort_key)


def _split_linear(vf: VectorField, params) -> tuple[VectorField, list[tuple[sp.Symbol, VectorField]]]:
    zero = {p: 0 for p in params}
    const = vf.subs(zero)
    parts = []
    for p in params:
        comps = [normalize(sp.diff(c, p)) for c in vf.coefficients]
        if any(c.has(*params) for c in comps):
            raise ValueError("generator must be linear in its parameters")
        parts.append((p, VectorField(*comps)))
    return const, parts


def _particular(vf: VectorField, pde: PerturbedPDE, ansatz: Ansatz) -> VectorField:
    h = auxiliary_H(vf, pde)
    system = assemble(pde, ansatz, sources=[h])
    n = len(ansatz.unknowns())
    mat = system.matrix()
    rows = [r[:n] for r in mat]
    rhs = [-r[n] for r in mat]
    try:
        sol = linalg.solve(rows, rhs, n)
    except linalg.Inconsistent:
        raise UnstableSymmetry(f"unstable symmetry: {vf} admits no deformation in the ansatz") from None
    return ansatz.field(sol)


def solve_deformation(vf: VectorField, pde: PerturbedPDE, ansatz: Ansatz = Ansatz()) -> Deformation:
    """Solve ``X1^(k) F0 |_{F0=0} + H = 0`` for the deformation ``X1``.

    A generator that is linear in free parameters (``A1*Dx + A2*...``) is
    solved parameter by parameter.
    """
    params = _parameters(vf)
    const, parts = _split_linear(vf, params)
    for piece in [const] + [q for _, q in parts]:
        if exact_residual(piece, pde) != 0:
            raise NotExactSymmetry("X0 is not an exact symmetry")
    particular = _particular(const, pde, ansatz) if not const.is_zero() else VectorField()
    for p, piece in parts:
        particular = particular + p * _particular(piece, pde, ansatz)
    homogeneous = solve_exact(pde, ansatz).fields
    return Deformation(particular, homogeneous, ansatz)


@dataclass
class StabilityReport:
    exact: list[VectorField]
    stable: list[bool]
    deformations: list[VectorField | None]


def stability(pde: PerturbedPDE, ansatz: Ansatz = Ansatz(),
              exact: GeneratorBasis | None = None) -> StabilityReport:
    exact = exact or solve_exact(pde, ansatz)
    stable, defs = [], []
    for vf in exact.fields:
        try:
            defs.append(solve_deformation(vf, pde, ansatz).particular)
            stable.append(True)
        except UnstableSymmetry:
            defs.append(None)
            stable.append(False)
    return StabilityReport(exact.fields, stable, defs)


def stable_subspace(pde: PerturbedPDE, ansatz: Ansatz, exact: GeneratorBasis) -> list[tuple[VectorField, VectorField]]:
    """Basis of stable exact symmetries paired with a deformation each.

    Solves the joint system in (combination coefficients, X1 ansatz
    coefficients), so a stable combination of unstable generators is found.
    """
    hs = [auxiliary_H(vf, pde) for vf in exact.fields]
    system = assemble(pde, ansatz, sources=hs)
    n = len(ansatz.unknowns())
    m = len(hs)
    null = linalg.nullspace(system.matrix(), n + m)
    combos = [v[n:] for v in null]
    red, pivots = linalg.rref(combos, m) if combos else ([], [])
    out = []
    for row in red:
        x0 = VectorField()
        for c, vf in zip(row, exact.fields):
            if c:
                x0 = x0 + as_rational(c) * vf
        out.append((x0, _particular(x0, pde, ansatz)))
    return out


def approximate_symmetries(pde: PerturbedPDE, ansatz: Ansatz = Ansatz(),
                           exact: GeneratorBasis | None = None) -> GeneratorBasis:
    """Deformed stable generators ``X0 + eps*X1`` followed by ``eps*X0``."""
    exact = exact or solve_exact(pde, ansatz)
    report = stability(pde, ansatz, exact)
    if all(report.stable):
        pairs = list(zip(exact.fields, report.deformations))
    else:
        pairs = stable_subspace(pde, ansatz, exact)
    fields = [x0 + EPS * x1 for x0, x1 in pairs]
    tags = ["deformed"] * len(fields)
    fields += [EPS * vf for vf in exact.fields]
    tags += ["eps"] * len(exact.fields)
    return GeneratorBasis(fields, tags)


def algebra_basis(exact: GeneratorBasis) -> GeneratorBasis:
    """Exact generators followed by their eps-multiples, without deformations.

    This is the basis in which commutator tables are reported.
    """
    fields = list(exact.fields) + [EPS * vf for vf in exact.fields]
    return GeneratorBasis(fields, ["exact"] * len(exact) + ["eps"] * len(exact))
