import pickle
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from atansum.exact import ExactScalar
from atansum.numerics import (
    BoundedReal,
    DenominatorZero,
    PrecisionContext,
    Undecidable,
    add_branch_ok,
    arctan_add,
    arctan_ratio,
    arctan_sub,
    pi_const,
    sub_branch_ok,
    tan_bounded,
)

CTX = PrecisionContext(30)
ratios = st.fractions(min_value=-50, max_value=50, max_denominator=40)


def oracle_atan(lam, x):
    with mpmath.workdps(60):
        return mpmath.atan(mpmath.mpf(lam.numerator) / lam.denominator
                           / (mpmath.mpf(x.numerator) / x.denominator))


def encloses(b: BoundedReal, value) -> bool:
    return abs(b.value - value) <= b.err


def test_pi_matches_mpmath_to_requested_digits():
    for digits in (5, 30, 200):
        ctx = PrecisionContext(digits)
        p = pi_const(ctx)
        with mpmath.workdps(digits + 30):
            assert abs(p.value - mpmath.pi) <= p.err
        assert p.certified_digits() >= digits


def test_interval_arithmetic_is_sound():
    a = CTX.exact(Fraction(1, 3))
    b = CTX.exact(Fraction(2, 7))
    with mpmath.workdps(80):
        assert encloses(a + b, mpmath.mpf(1) / 3 + mpmath.mpf(2) / 7)
        assert encloses(a * b, mpmath.mpf(2) / 21)
        assert encloses(a / b, mpmath.mpf(7) / 6)
        assert encloses(a - b, mpmath.mpf(1) / 21)


def test_sign_is_undecidable_inside_the_radius():
    b = BoundedReal(CTX.mp.mpf(0), CTX.mp.mpf("1e-40"))
    with pytest.raises(Undecidable):
        b.sign()
    assert CTX.exact(-2).sign() == -1


def test_bounded_real_pickles():
    v = arctan_ratio(1, 3, CTX)
    w = pickle.loads(pickle.dumps(v))
    assert w.value == v.value and w.err == v.err


@given(ratios, ratios)
def test_arctan_ratio_encloses_oracle(lam, x):
    assume(x != 0)
    assert encloses(arctan_ratio(lam, x, CTX), oracle_atan(lam, x))


def test_arctan_of_zero_denominator_follows_zero_side():
    hp = pi_const(CTX).value / 2
    assert arctan_ratio(-2, 0, CTX).value == -hp
    assert arctan_ratio(3, 0, CTX, zero_side=-1).value == -hp


def test_arctan_with_surd_argument():
    v = arctan_ratio(ExactScalar.sqrt(3), 1, CTX)
    assert abs(v.value - pi_const(CTX).value / 3) <= v.err + 1e-40


def test_tan_bounded_rejects_right_angle():
    with pytest.raises(ValueError):
        tan_bounded(pi_const(CTX) * Fraction(1, 2), CTX)
    t = tan_bounded(pi_const(CTX) * Fraction(1, 4), CTX)
    assert abs(t.value - 1) <= t.err


def test_subtraction_branch_conditions():
    # lam^2/(xy) > -1 holds
    assert sub_branch_ok(1, -1, 5)
    # lam^2/(xy) < -1 fails: atan(2/-1) - atan(2/1) is -2atan(2), below -pi/2
    assert not sub_branch_ok(2, -1, 1)
    assert add_branch_ok(1, 2, 3)
    assert not add_branch_ok(3, 1, 2)


def test_addition_with_zero_denominator_raises():
    with pytest.raises(DenominatorZero):
        arctan_add(2, 1, 4, CTX)


def _check_sub(lam, x, y):
    combined, ok = arctan_sub(lam, x, y, CTX)
    with mpmath.workdps(60):
        direct = oracle_atan(lam, x) - oracle_atan(lam, y)
        gap = direct - combined.value
        if ok:
            return abs(gap) <= combined.err + mpmath.mpf(10) ** -50
        return abs(abs(gap) - mpmath.pi) <= combined.err + mpmath.mpf(10) ** -50


def _check_add(lam, x, y):
    if x * y == lam * lam:
        return True
    combined, ok = arctan_add(lam, x, y, CTX)
    with mpmath.workdps(60):
        direct = oracle_atan(lam, x) + oracle_atan(lam, y)
        gap = direct - combined.value
        if ok:
            return abs(gap) <= combined.err + mpmath.mpf(10) ** -50
        return abs(abs(gap) - mpmath.pi) <= combined.err + mpmath.mpf(10) ** -50


@given(ratios, ratios, ratios)
def test_two_arctangent_formulas_agree_up_to_a_half_turn(lam, x, y):
    assume(lam != 0 and x != 0 and y != 0)
    assert _check_sub(lam, x, y)
    assert _check_add(lam, x, y)
