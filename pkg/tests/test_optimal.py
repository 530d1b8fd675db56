import random
from fractions import Fraction

import pytest
import sympy as sp

from approxsym import reference
from approxsym.liealg import killing_form
from approxsym.optimal import (
    FAMILIES, ReductionTrace, act, audit_table, classify, normalize_vector, random_vector, replay,
)


def quadratic(form, w):
    return sum(form[i][j] * w[i] * w[j] for i in range(10) for j in range(10))


def random_group_element(rng):
    """Generator index and a parameter; log parameters for the scaling generators."""
    i = rng.randrange(10)
    if i in (2, 3):
        return i, sp.log(sp.Rational(rng.randint(1, 9), rng.randint(1, 9)))
    return i, sp.Rational(rng.randint(-5, 5), rng.randint(1, 3))


@pytest.mark.parametrize("k, family", [(8, 1), (7, 2), (1, 9)])
def test_unit_vectors(adjoints, k, family):
    w = [Fraction(int(i == k - 1)) for i in range(10)]
    assert classify(w, adjoints) == family


def test_known_reduction(adjoints):
    w = [0, 1, 0, 0, 0, 5, 0, 1, 0, 0]
    rep, trace = normalize_vector(w, adjoints)
    assert rep.text() == "v2 + v6 + v8"
    assert trace.script() == "scale 1\nad v3 -1*ln(5)\n"


def test_zero_vector_is_rejected(adjoints):
    with pytest.raises(ValueError, match="zero vector"):
        normalize_vector([0] * 10, adjoints)


def test_trace_script_round_trip(adjoints):
    rng = random.Random(5)
    for _ in range(50):
        w = random_vector(rng)
        rep, trace = normalize_vector(w, adjoints)
        again = ReductionTrace.from_script(trace.script())
        assert replay(again, w, adjoints) == rep.vector


def test_killing_quadratic_is_preserved_up_to_scale(algebra, adjoints):
    form = killing_form(algebra)
    rng = random.Random(6)
    for _ in range(200):
        w = random_vector(rng)
        rep, trace = normalize_vector(w, adjoints)
        assert quadratic(form, rep.vector) == quadratic(form, w) * trace.scale**2


def test_reduction_stays_on_orbit_after_random_moves(adjoints):
    rng = random.Random(7)
    for _ in range(100):
        w = random_vector(rng)
        moved = w
        for _ in range(3):
            i, mu = random_group_element(rng)
            moved = act(adjoints[i], mu, moved)
        rep, trace = normalize_vector(moved, adjoints)
        assert replay(trace, moved, adjoints) == rep.vector


def test_family_label_is_not_an_orbit_invariant(adjoints):
    # the ladder pivots on a10 first, but a10 is not preserved by the group
    w = [Fraction(int(i in (1, 4, 8))) for i in range(10)]  # v2 + v5 + v9
    moved = act(adjoints[7], sp.Integer(1), w)  # Ad(exp(v8)) puts v10 into play
    assert moved[9] != 0
    assert classify(w, adjoints) == 15
    assert classify(moved, adjoints) == 17


def test_nonzero_a10_always_lands_in_its_family(adjoints):
    rng = random.Random(9)
    for _ in range(200):
        w = random_vector(rng)
        w[9] = w[9] or Fraction(1)
        assert classify(w, adjoints) == 17


def test_v10_kill_step_clears_v8(adjoints):
    w = [Fraction(0)] * 10
    w[9], w[7] = Fraction(1), Fraction(4)
    rep, trace = normalize_vector(w, adjoints)
    assert rep.vector[7] == 0 and rep.family == 17
    assert trace.steps[0].generator == 0


def test_every_family_is_a_fixed_point(adjoints):
    rng = random.Random(8)
    for fam in FAMILIES:
        for _ in range(5):
            w = fam.instance([Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in fam.free])
            rep, _ = normalize_vector(w, adjoints)
            assert rep.family == fam.ident and rep.vector == w


def test_audit_of_printed_families(adjoints):
    report = audit_table(adjoints, seed=0)
    assert all(row.fixed_point for row in report.rows)
    assert (15, 16) in report.duplicates
    assert report.unlisted == [17]
    assert len(report.rows) == len(reference.OPTIMAL)
