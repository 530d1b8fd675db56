import random

import pytest
import sympy as sp

from approxsym.grammar import ParseError, parse, to_text
from approxsym.symbolic import EPS, U, X, jet, normalize

from randomized import expr


def test_parse_basic_forms():
    assert parse("1/2*u^3*u_xxx") == sp.Rational(1, 2) * U**3 * jet("xxx")
    assert parse("x^2/3") == X ** sp.Rational(2, 3)
    assert parse("-eps*x") == -EPS * X


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse("x +\n  * u")
    assert (info.value.line, info.value.column) == (2, 3)


@pytest.mark.parametrize("text", [
    "u/(1 + x)", "ln(1 + x) + t", "exp(-3*mu)", "t^1/3*u",
    "(-1*b*arctan(x/sqrt(a + c*eps)) + t*sqrt(a + c*eps))/sqrt(a + c*eps)",
])
def test_printed_text_reparses(text):
    e = normalize(parse(text))
    assert normalize(parse(to_text(e))) == e


def test_round_trip_randomized():
    rng = random.Random(2)
    for _ in range(100):
        e = normalize(expr(rng))
        assert normalize(parse(to_text(e))) == e
