import random

import pytest
import sympy as sp

from approxsym.jet import (
    JetOverflow, VectorField, apply_prolonged, multi_indices, prolong, total_derivative,
)
from approxsym.symbolic import T, U, X, jet, jet_symbols, normalize

from randomized import field, poly


def bracket(a: VectorField, b: VectorField) -> VectorField:
    """Plain commutator, no truncation."""
    return VectorField(*(a(cb) - b(ca) for ca, cb in zip(a.coefficients, b.coefficients)))


def inductive_prolongation(vf: VectorField, k: int) -> dict:
    """Classic recursion ``phi^{J,i} = D_i phi^J - sum_j D_i(xi^j) u_{J,j}``."""
    out = {"": vf.phi}
    for idx in multi_indices(k):
        last = idx[-1] if idx.endswith("t") else "x"
        parent = idx[:-1] if last == "t" else idx[1:]
        prev = out[parent]
        value = total_derivative(prev, last, k + 1)
        for coef, d in ((vf.xi, "x"), (vf.tau, "t")):
            u_jd = jet(parent + d) if parent or d else U
            value -= total_derivative(coef, last, k + 1) * u_jd
        out[idx] = normalize(value)
    return out


def test_scaling_field_fixes_first_jets():
    p = prolong(VectorField(X, 0, U), 1)
    assert p["x"] == 0
    assert p["t"] == jet("t")


def test_total_derivative_example():
    e = sp.Rational(1, 2) * U**3 * jet("xxx") + jet("t")
    got = total_derivative(e, "x", 4)
    assert got == normalize(sp.Rational(1, 2) * U**3 * jet("xxxx")
                            + sp.Rational(3, 2) * U**2 * jet("x") * jet("xxx") + jet("xt"))


def test_total_derivative_overflow():
    with pytest.raises(JetOverflow):
        total_derivative(jet("xxx"), "x", 3)


def test_translation_leaves_equation_invariant(pde):
    assert apply_prolonged(prolong(VectorField(0, 1, 0), 3), pde.F0) == 0


def test_point_field_rejects_jets():
    with pytest.raises(ValueError):
        VectorField(jet("x"), 0, 0)


@pytest.mark.parametrize("seed", range(5))
def test_characteristic_form_matches_inductive_oracle(seed):
    rng = random.Random(seed)
    vf = field(rng)
    pr = prolong(vf, 3)
    oracle = inductive_prolongation(vf, 3)
    for idx in multi_indices(3):
        assert normalize(pr[idx] - oracle[idx]) == 0, idx


def test_prolongation_has_no_overflow_terms():
    pr = prolong(VectorField(X**2 * T, T**2, X * U), 2)
    assert all(len(s.name) - 2 <= 2 for c in pr.coeffs.values() for s in jet_symbols(c))


def test_bracket_compatibility_sample():
    rng = random.Random(3)
    a, b = field(rng), field(rng)
    f = poly(rng, (X, U, jet("x"), jet("t"), jet("xx")), degree=2)
    pa, pb = prolong(a, 2), prolong(b, 2)
    lhs = apply_prolonged(prolong(bracket(a, b), 2), f)
    rhs = apply_prolonged(pa, apply_prolonged(pb, f)) - apply_prolonged(pb, apply_prolonged(pa, f))
    assert normalize(lhs - rhs) == 0
