from fractions import Fraction

import sympy as sp
from hypothesis import given, settings, strategies as st

from approxsym import linalg
from approxsym.adjoint import ExpNumber, ExpPoly
from approxsym.grammar import parse, to_text
from approxsym.symbolic import EPS, X, EpsTruncated, eps_truncate

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=m, max_size=m)))
exp_numbers = st.dictionaries(rationals, rationals, max_size=3).map(ExpNumber)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_nullspace_matches_sympy(rows):
    n = len(rows[0])
    null = linalg.nullspace(rows, n)
    assert len(null) == len(sp.Matrix(rows).nullspace())
    for v in null:
        assert linalg.matvec(rows, v) == [0] * len(rows)


@settings(max_examples=60, deadline=None)
@given(exp_numbers, exp_numbers, exp_numbers)
def test_exp_numbers_form_a_commutative_ring(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a - a) == 0


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=3), rationals, rationals, rationals)
def test_exppoly_evaluation_is_multiplicative(coeffs, lam, nu, mu):
    p = ExpPoly.from_dict({lam: coeffs})
    q = ExpPoly.from_dict({nu: coeffs[::-1]})
    assert (p * q).at(mu) == p.at(mu) * q.at(mu)


@settings(max_examples=60, deadline=None)
@given(rationals)
def test_rationals_round_trip(q):
    e = sp.Rational(q.numerator, q.denominator) * X
    assert parse(to_text(e)) == e


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=3, max_size=3))
def test_truncation_multiplies_first_order_parts(p, q):
    a = sum(sp.Rational(c.numerator, c.denominator) * EPS**k for k, c in enumerate(p))
    b = sum(sp.Rational(c.numerator, c.denominator) * EPS**k for k, c in enumerate(q))
    assert eps_truncate(a * b) == eps_truncate(a) * eps_truncate(b)
    assert EpsTruncated(sp.Integer(1), sp.Integer(0)) * eps_truncate(a) == eps_truncate(a)


def test_fraction_rank_of_identity():
    assert linalg.rank(linalg.identity(4)) == 4
    assert linalg.det([[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]]) == -2
