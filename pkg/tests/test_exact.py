from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from atansum.exact import ExactScalar, Poly, poly_gcd

k = sympy.Symbol("k")
small = st.fractions(min_value=-20, max_value=20, max_denominator=12)
coeff_lists = st.lists(small, min_size=1, max_size=5)


def to_sympy(p: Poly):
    return sympy.Add(*[sympy.Rational(c.numerator, c.denominator) * k**i for i, c in enumerate(p.coeffs)])


def test_surd_normalisation():
    assert str(ExactScalar.sqrt(12)) == "2*sqrt(3)"
    assert ExactScalar.sqrt(4).is_rational
    assert ExactScalar.sqrt(Fraction(1, 2)) == ExactScalar.sqrt(2) / 2
    assert ExactScalar.sqrt(8) + ExactScalar.sqrt(2) == ExactScalar.sqrt(18)


def test_mixed_surds_refuse_to_add():
    with pytest.raises(ValueError):
        ExactScalar.sqrt(2) + ExactScalar.sqrt(3)


@given(st.fractions(max_denominator=50), st.sampled_from([1, 2, 3, 5, 6, 7]))
def test_surd_square_and_sign(r, n):
    s = ExactScalar.coerce(r) * ExactScalar.sqrt(n)
    assert s.square() == r * r * n
    assert s.sign() == (r > 0) - (r < 0)
    assert -(-s) == s


@given(coeff_lists, coeff_lists)
def test_poly_ring_matches_sympy(a, b):
    pa, pb = Poly(a), Poly(b)
    assert sympy.expand(to_sympy(pa * pb) - to_sympy(pa) * to_sympy(pb)) == 0
    assert sympy.expand(to_sympy(pa + pb) - to_sympy(pa) - to_sympy(pb)) == 0


@given(coeff_lists, small)
def test_poly_shift_matches_substitution(a, s):
    p = Poly(a)
    expected = sympy.expand(to_sympy(p).subs(k, k + sympy.Rational(s.numerator, s.denominator)))
    assert sympy.expand(to_sympy(p.shift(s)) - expected) == 0


@given(coeff_lists, st.integers(-10, 10))
def test_poly_evaluation(a, x):
    p = Poly(a)
    assert p(x) == sum(c * x**i for i, c in enumerate(a))


def test_gcd_and_division():
    assert poly_gcd(Poly([-1, 0, 1]), Poly([1, 1])) == Poly([1, 1])
    q, r = divmod(Poly([0, 0, 1]), Poly([1, 1]))
    assert q == Poly([-1, 1]) and r == Poly([1])


@given(coeff_lists, coeff_lists)
def test_gcd_divides_both(a, b):
    pa, pb = Poly(a), Poly(b)
    if pa.is_zero() or pb.is_zero():
        return
    g = poly_gcd(pa, pb)
    assert (pa % g).is_zero() and (pb % g).is_zero()
    expected = sympy.gcd(to_sympy(pa), to_sympy(pb))
    assert sympy.degree(expected, k) == g.degree
