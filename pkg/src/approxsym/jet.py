"""Jet space: total derivatives and prolongation of point vector fields."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import sympy as sp

from .grammar import to_text
from .symbolic import (
    EPS, T, U, X, eps_truncate, jet, jet_index, jet_symbols, normalize,
)


class JetOverflow(ValueError):
    pass


def jet_order(e) -> int:
    """Highest jet order present in ``e`` (0 when only x, t, u occur)."""
    return max((len(jet_index(s)) for s in jet_symbols(e)), default=0)


@dataclass(frozen=True)
class VectorField:
    """Point vector field ``xi*Dx + tau*Dt + phi*Du``."""

    xi: sp.Expr = sp.Integer(0)
    tau: sp.Expr = sp.Integer(0)
    phi: sp.Expr = sp.Integer(0)

    def __post_init__(self):
        for name in ("xi", "tau", "phi"):
            object.__setattr__(self, name, normalize(getattr(self, name)))
        if any(jet_symbols(c) for c in self.coefficients):
            raise ValueError("point vector fields cannot depend on jet coordinates")

    @property
    def coefficients(self) -> tuple:
        return (self.xi, self.tau, self.phi)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(*(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(*(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __rmul__(self, c) -> "VectorField":
        return VectorField(*(c * a for a in self.coefficients))

    def __neg__(self) -> "VectorField":
        return (-1) * self

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def __call__(self, f):
        """Action on a function of ``x, t, u`` (and constants)."""
        f = sp.sympify(f)
        return normalize(self.xi * sp.diff(f, X) + self.tau * sp.diff(f, T)
                         + self.phi * sp.diff(f, U))

    def characteristic(self):
        return normalize(self.phi - self.xi * jet("x") - self.tau * jet("t"))

    def split_eps(self) -> tuple["VectorField", "VectorField"]:
        """``(X0, X1)`` with ``self = X0 + eps*X1`` modulo ``eps**2``."""
        parts = [eps_truncate(c) for c in self.coefficients]
        return (VectorField(*(p.order0 for p in parts)),
                VectorField(*(p.order1 for p in parts)))

    def truncated(self) -> "VectorField":
        x0, x1 = self.split_eps()
        return x0 + EPS * x1

    def subs(self, bindings) -> "VectorField":
        return VectorField(*(c.xreplace(bindings) for c in self.coefficients))

    def to_text(self) -> str:
        parts = []
        for c, d in zip(self.coefficients, ("Dx", "Dt", "Du")):
            if c == 0:
                continue
            parts.append(d if c == 1 else f"({to_text(c)})*{d}")
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.to_text()


def total_derivative(e, direction: str, max_order: int):
    """``D_x e`` or ``D_t e`` on the jet space truncated at ``max_order``."""
    var = {"x": X, "t": T}[direction]
    e = sp.sympify(e)
    out = sp.diff(e, var)
    for s in [U] + jet_symbols(e):
        if not e.has(s):
            continue
        idx = jet_index(s)
        if len(idx) + 1 > max_order:
            raise JetOverflow(f"jet overflow: D_{direction} {s} exceeds order {max_order}")
        out += jet(idx + direction) * sp.diff(e, s)
    return normalize(out)


def multi_indices(k: int) -> list[str]:
    """All canonical multi-indices over {x, t} of length 1..k."""
    out = []
    for n in range(1, k + 1):
        for combo in combinations_with_replacement("xt", n):
            out.append("".join(combo))
    return out


@dataclass(frozen=True)
class ProlongedField:
    base: VectorField
    order: int
    coeffs: dict = field(hash=False)

    def __getitem__(self, index: str):
        return self.coeffs[jet_index(jet(index))]


def prolong(vf: VectorField, k: int) -> ProlongedField:
    """k-th prolongation in characteristic form.

    ``phi^J = D_J(Q) + xi*u_{Jx} + tau*u_{Jt}`` with characteristic
    ``Q = phi - xi*u_x - tau*u_t``.
    """
    if k < 1:
        raise ValueError("prolongation order must be >= 1")
    q = vf.characteristic()
    derivs = {"": q}
    coeffs = {}
    for idx in multi_indices(k):
        # D_J Q from the shorter index with the last direction removed
        last = idx[-1] if idx.endswith("t") else "x"
        parent = idx[:-1] if last == "t" else idx[1:]
        dq = total_derivative(derivs[parent], last, k + 1)
        derivs[idx] = dq
        coeffs[idx] = normalize(dq + vf.xi * jet(idx + "x") + vf.tau * jet(idx + "t"))
    return ProlongedField(vf, k, coeffs)


def apply_prolonged(px: ProlongedField, f):
    f = sp.sympify(f)
    if jet_order(f) > px.order:
        raise ValueError(f"expression has jet order {jet_order(f)} > {px.order}")
    vf = px.base
    out = vf.xi * sp.diff(f, X) + vf.tau * sp.diff(f, T) + vf.phi * sp.diff(f, U)
    for s in jet_symbols(f):
        out += px.coeffs[jet_index(s)] * sp.diff(f, s)
    return normalize(out)
