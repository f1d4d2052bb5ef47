from fractions import Fraction

import pytest

from atansum.closedform import ClosedFormExpr
from atansum.exact import ExactScalar, Poly
from atansum.parser import (
    ExprSyntaxError,
    parse_closed_form,
    parse_expr,
    parse_rational_function,
    parse_scalar,
    parse_sequence,
)


@pytest.mark.parametrize("text, value", [
    ("1/2", ExactScalar.coerce(Fraction(1, 2))),
    ("-3", ExactScalar.coerce(-3)),
    ("sqrt(12)/4", ExactScalar.sqrt(3) / 2),
    ("2^-2", ExactScalar.coerce(Fraction(1, 4))),
    ("(1+2)*3", ExactScalar.coerce(9)),
    ("-2^2", ExactScalar.coerce(-4)),
])
def test_scalars(text, value):
    assert parse_scalar(text) == value


def test_power_is_right_associative():
    assert parse_scalar("2^3^2") == ExactScalar.coerce(512)


def test_rational_functions_reduce():
    rf = parse_rational_function("(k^2-1)/(k+1)")
    assert rf.is_poly() and rf.as_poly() == Poly([-1, 1])
    assert str(parse_rational_function("sqrt(3)*k/(k^2+1)")) == "sqrt(3)*(k)/(k^2+1)"


def test_sequences_keep_their_power():
    f = parse_sequence("(k^2+1)^2")
    assert f.power == 2 and f.base == Poly([1, 0, 1])


def test_closed_forms():
    e = parse_closed_form("pi^2/8")
    assert e == ClosedFormExpr.pi(2, Fraction(1, 8))
    assert isinstance(parse_expr("atan(1/2)+atan(1/3)"), ClosedFormExpr)


@pytest.mark.parametrize("text, pos", [("1+*2", 2), ("atan(1", 6), ("k^", 2)])
def test_syntax_errors_point_at_the_offending_token(text, pos):
    with pytest.raises(ExprSyntaxError) as info:
        parse_rational_function(text)
    assert f"position {pos}" in str(info.value)


def test_semantic_errors():
    with pytest.raises(ExprSyntaxError):
        parse_scalar("1/0")
    with pytest.raises(ExprSyntaxError):
        parse_closed_form("atan(1/0)")
    with pytest.raises(ExprSyntaxError):
        parse_sequence("1-k")
    with pytest.raises(ExprSyntaxError):
        parse_scalar("k+1")
