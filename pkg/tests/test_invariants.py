import pytest
import sympy as sp

from approxsym import reference
from approxsym.grammar import parse
from approxsym.invariants import (
    NotInCatalog, characteristic_invariants, generator, independent, invariant_table,
    verify_invariant,
)
from approxsym.jet import VectorField
from approxsym.symbolic import EPS, T, U, X

a, b, c, d = sp.symbols("a b c d")


def test_verify_simple_invariants():
    scaling = VectorField(X, 0, U)
    assert verify_invariant(scaling, U / X)
    assert not verify_invariant(scaling, U)


def test_relaxed_mode_ignores_eps_squared():
    vf = VectorField(1, 0, 0)
    inv = T + EPS**2 * X
    assert not verify_invariant(vf, inv)
    assert verify_invariant(vf, inv, relaxed=True)


@pytest.mark.parametrize("vf", [
    VectorField(1, 0, 0),
    VectorField(X, 0, U),
    VectorField(1 + X, EPS, U),
    VectorField(X**2 + 3 * X + 2, 1, X * U),
    VectorField(X**2 + 1, 2, (1 + X) * U),
    VectorField((X - 2)**2, 1, U),
    VectorField(0, 1, 2 * U),
])
def test_catalog_pairs_are_independent_invariants(vf):
    pair = characteristic_invariants(vf)
    assert verify_invariant(vf, pair.first) and verify_invariant(vf, pair.second)
    assert independent(pair)


def test_out_of_catalog():
    with pytest.raises(NotInCatalog, match="verify_invariant"):
        characteristic_invariants(VectorField(0, 3 * T, -U))
    with pytest.raises(NotInCatalog):
        characteristic_invariants(VectorField(X**2 - 2, 1, 0))


def test_generator_from_text(basis):
    vf = generator("v7 + a*v8", basis)
    assert vf == VectorField(a * EPS * X, EPS, a * EPS * U)


def test_worked_pair(basis):
    op, first, second = reference.WORKED_INVARIANTS
    vf = generator(op, basis)
    assert verify_invariant(vf, parse(first)) and verify_invariant(vf, parse(second))


def test_printed_table(basis):
    rows = invariant_table(basis)
    assert len(rows) == 14
    status = {r.operator: r.status for r in rows}
    assert status.pop("v1 + a*v2 + b*v7") == "replaced"
    assert set(status.values()) == {"pass"}


def test_replacement_for_garbled_row(basis):
    vf = generator("v1 + a*v2 + b*v7", basis)
    pair = characteristic_invariants(vf)
    assert sp.simplify(pair.first - (T - (a + b * EPS) * X)) == 0


def test_arctan_row_needs_canonical_quadratic(basis):
    op, first, second = reference.INVARIANTS[-1]
    printed_v5 = VectorField(2 * X**2, 0, X * U)
    canonical = generator(op, basis)
    swapped = canonical - generator("v5", basis) + printed_v5
    assert verify_invariant(canonical, parse(first)) and verify_invariant(canonical, parse(second))
    assert not verify_invariant(swapped, parse(second))
