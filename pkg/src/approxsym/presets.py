"""Cached pipeline results for the built-in perturbed Harry Dym equation."""
from __future__ import annotations

from functools import lru_cache

from .adjoint import adjoint_table
from .detsolve import Ansatz, PerturbedPDE, algebra_basis, solve_exact
from .liealg import structure_constants

PRESETS = {"harry-dym": PerturbedPDE.harry_dym}


def preset_pde(name: str) -> PerturbedPDE:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None


@lru_cache(maxsize=None)
def exact_basis(name: str = "harry-dym", ansatz: Ansatz = Ansatz()):
    return solve_exact(preset_pde(name), ansatz)


@lru_cache(maxsize=None)
def algebra(name: str = "harry-dym"):
    """Structure constants of ``v1..v5`` (exact) and ``v6..v10 = eps*v1..eps*v5``."""
    return structure_constants(algebra_basis(exact_basis(name)).fields)


@lru_cache(maxsize=None)
def adjoints(name: str = "harry-dym"):
    return tuple(adjoint_table(algebra(name)))
