from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from atansum.closedform import ClosedFormExpr, eval_expr, expr_equal, simplify
from atansum.numerics import PrecisionContext
from atansum.parser import parse_closed_form

CTX = PrecisionContext(40)


@pytest.mark.parametrize("text, expected", [
    ("atan(1/2)+atan(1/3)", "pi/4"),
    ("atan(1)+atan(1/2)+atan(1/3)", "pi/2"),
    ("atan(-1)", "-pi/4"),
    ("atan(sqrt(3))", "pi/3"),
    ("atan(1/sqrt(3))", "pi/6"),
])
def test_simplify_collects_known_angles(text, expected):
    assert simplify(parse_closed_form(text)) == simplify(parse_closed_form(expected))


@pytest.mark.parametrize("text", ["4*atan(1/5)-atan(1/239)", "2*atan(1/3)+atan(1/7)"])
def test_weighted_machin_formulas_are_equal_numerically(text):
    # simplify merges only unit-weight pairs; equality is still decidable numerically
    assert expr_equal(parse_closed_form(text), parse_closed_form("pi/4"), CTX)
    assert not expr_equal(parse_closed_form(text), parse_closed_form("pi/4 + 10^-30"), CTX)


def test_eval_against_mpmath():
    e = parse_closed_form("pi^3/64 + atan(1/4)*atan(1/3)")
    v = eval_expr(e, CTX)
    with mpmath.workdps(60):
        assert abs(v.value - (mpmath.pi**3 / 64 + mpmath.atan(mpmath.mpf(1) / 4) * mpmath.atan(mpmath.mpf(1) / 3))) <= v.err


@given(st.fractions(min_value=-5, max_value=5, max_denominator=9),
       st.fractions(min_value=-5, max_value=5, max_denominator=9))
def test_simplify_preserves_value(a, b):
    e = ClosedFormExpr.atan(a) + ClosedFormExpr.atan(b) * 2 + ClosedFormExpr.pi(1, Fraction(1, 3))
    s = simplify(e)
    assert abs(eval_expr(e, CTX).value - eval_expr(s, CTX).value) <= 1e-35


def test_arithmetic():
    two = ClosedFormExpr.const(2)
    p = ClosedFormExpr.pi()
    assert simplify(p * p - p * p).is_zero()
    assert (two * 3).const_value() == 6
