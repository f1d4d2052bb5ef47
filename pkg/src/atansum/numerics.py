"""Arbitrary-precision reals with absolute error radii, and the arctangent kernel.

Every evaluated quantity is a :class:`BoundedReal`: a working-precision value
plus a radius that covers all rounding committed so far. Radii are propagated
conservatively (first-order interval style), never by exact rounding analysis.

The kernel :func:`arctan_ratio` always returns the principal value of
``atan(lam/x)``. A zero denominator gives ``sign(lam) * pi/2``; passing
``zero_side=-1`` treats the zero as approached from below instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import mpmath

from .exact import ExactScalar

Exact = Union[int, Fraction, ExactScalar]


class BothZero(ZeroDivisionError):
    """atan(0/0): the term is ill-defined."""


class DenominatorZero(ZeroDivisionError):
    """The two-arctangent sum formula hit ``x*y == lam**2``."""


class Undecidable(ArithmeticError):
    """A sign needed for a branch decision is not resolved by the error radius."""


@lru_cache(maxsize=None)
def _mp(prec: int) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


@dataclass(frozen=True)
class PrecisionContext:
    """Requested decimal digits plus guard digits for working precision."""

    digits: int = 30
    guard: int = 10

    def __post_init__(self) -> None:
        if self.digits < 1:
            raise ValueError(f"digits must be >= 1, got {self.digits}")
        if self.guard < 10:
            raise ValueError(f"guard must be >= 10, got {self.guard}")

    @classmethod
    def for_terms(cls, digits: int, n_terms: int) -> "PrecisionContext":
        """Guard digits sized for accumulating ``n_terms`` roundings."""
        return cls(digits, 10 + math.ceil(math.log10(n_terms + 1)))

    @property
    def working_digits(self) -> int:
        return self.digits + self.guard

    @property
    def prec(self) -> int:
        return math.ceil(self.working_digits * math.log2(10)) + 4

    @property
    def mp(self) -> mpmath.ctx_mp.MPContext:
        return _mp(self.prec)

    def tolerance(self):
        return self.mp.mpf(10) ** (-self.digits)

    def exact(self, x) -> "BoundedReal":
        """Round an exact scalar into a BoundedReal."""
        if isinstance(x, BoundedReal):
            return x
        return _round_exact(x, self.mp)


def _ulp(mp) -> "mpmath.mpf":
    # Relative rounding unit for round-to-nearest at mp.prec bits.
    return mp.ldexp(mp.mpf(1), 1 - mp.prec)


def _round_exact(x, mp) -> "BoundedReal":
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        v = mp.mpf(x.numerator) / x.denominator
        exact = x.denominator == 1 and abs(x.numerator) < 2 ** (mp.prec - 1)
        return BoundedReal(v, mp.mpf(0) if exact else abs(v) * _ulp(mp))
    if isinstance(x, ExactScalar):
        v = mp.mpf(x.r.numerator) / x.r.denominator
        if x.n != 1:
            v *= mp.sqrt(x.n)
        return BoundedReal(v, abs(v) * 4 * _ulp(mp))
    raise TypeError(f"cannot round {type(x).__name__}")


def _pad(err, mp):
    # Radii are themselves rounded; inflate slightly so they stay upper bounds.
    return err * (1 + 8 * _ulp(mp))


@dataclass(frozen=True)
class BoundedReal:
    """A value ``value`` whose true counterpart lies within ``err`` of it."""

    value: "mpmath.mpf"
    err: "mpmath.mpf"

    @property
    def mp(self):
        return self.value.context

    def _lift(self, other) -> "BoundedReal":
        if isinstance(other, BoundedReal):
            return other
        if isinstance(other, (int, Fraction, ExactScalar)):
            return _round_exact(other, self.mp)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        mp = self.mp
        v = self.value + other.value
        return BoundedReal(v, _pad(self.err + other.err + abs(v) * _ulp(mp), mp))

    __radd__ = __add__

    def __neg__(self) -> "BoundedReal":
        return BoundedReal(-self.value, self.err)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        mp = self.mp
        v = self.value * other.value
        err = (abs(self.value) * other.err + abs(other.value) * self.err
               + self.err * other.err + abs(v) * _ulp(mp))
        return BoundedReal(v, _pad(err, mp))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        mp = self.mp
        den = abs(other.value) - other.err
        if den <= 0:
            raise Undecidable("divisor interval contains zero")
        v = self.value / other.value
        err = (self.err + abs(v) * other.err) / den + abs(v) * _ulp(mp)
        return BoundedReal(v, _pad(err, mp))

    def __pow__(self, e: int) -> "BoundedReal":
        if e < 0:
            raise ValueError("negative power")
        result = BoundedReal(self.mp.mpf(1), self.mp.mpf(0))
        for _ in range(e):
            result = result * self
        return result

    def __abs__(self) -> "BoundedReal":
        return BoundedReal(abs(self.value), self.err)

    def __reduce__(self):
        # values from a private mpmath context do not pickle by themselves
        return (_restore, (self.mp.prec, self.value._mpf_, self.err._mpf_))

    def __float__(self) -> float:
        return float(self.value)

    def sign(self) -> int:
        """Sign of the enclosed number, raising when the radius straddles zero."""
        if self.value > self.err:
            return 1
        if self.value < -self.err:
            return -1
        if self.value == 0 and self.err == 0:
            return 0
        raise Undecidable(f"sign undetermined: {self}")

    def contains(self, x) -> bool:
        return abs(self.value - x) <= self.err

    def lower(self):
        return self.value - self.err

    def upper(self):
        return self.value + self.err

    def certified_digits(self) -> int:
        """Decimal places guaranteed by the radius."""
        if self.err == 0:
            return int(self.mp.prec * math.log10(2))
        return max(0, int(math.floor(-float(self.mp.log10(self.err)))))

    def nstr(self, n: int) -> str:
        return self.mp.nstr(self.value, n, strip_zeros=False)

    def __str__(self) -> str:
        return f"{self.mp.nstr(self.value, 20)} +/- {self.mp.nstr(self.err, 3)}"


Angle = BoundedReal


def _restore(prec: int, value, err) -> BoundedReal:
    mp = _mp(prec)
    return BoundedReal(mp.make_mpf(value), mp.make_mpf(err))


def pi_const(ctx: PrecisionContext) -> BoundedReal:
    """pi from Machin's formula in fixed-point integers, with a certified radius."""
    value, err = _machin_pi(ctx.prec)
    return BoundedReal(ctx.mp.mpf(value), ctx.mp.mpf(err))


@lru_cache(maxsize=64)
def _machin_pi(prec: int):
    bits = prec + 24
    one = 1 << bits

    def atan_inv(n: int) -> tuple[int, int]:
        # floor-truncated series; each term is off by < 1 unit, the tail by < 1 unit
        total, power, i, terms = 0, one // n, 0, 0
        n2 = n * n
        while power:
            term = power // (2 * i + 1)
            total += -term if i & 1 else term
            power //= n2
            i += 1
            terms += 1
        return total, 2 * terms + 2

    a5, e5 = atan_inv(5)
    a239, e239 = atan_inv(239)
    fixed = 16 * a5 - 4 * a239
    units = 16 * e5 + 4 * e239
    mp = _mp(prec)
    value = mp.ldexp(mp.mpf(fixed), -bits)
    err = mp.ldexp(mp.mpf(units), -bits) + 4 * abs(value) * _ulp(mp)
    return value, err


def _exact_sign(x) -> int:
    if isinstance(x, BoundedReal):
        return x.sign()
    if isinstance(x, ExactScalar):
        return x.sign()
    return (x > 0) - (x < 0)


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, ExactScalar))


def half_pi(ctx: PrecisionContext, sign: int = 1) -> Angle:
    p = pi_const(ctx)
    return BoundedReal(sign * p.value / 2, p.err / 2)


def arctan_ratio(lam, x, ctx: PrecisionContext, zero_side: int = 1) -> Angle:
    """Principal value of ``atan(lam / x)`` with radius below ``10**-digits``.

    ``lam`` and ``x`` may be exact (int, Fraction, ExactScalar) or BoundedReal.
    A zero ``x`` yields ``zero_side * sign(lam) * pi/2``.
    """
    mp = ctx.mp
    if _is_exact(x) and x == 0:
        s = _exact_sign(lam)
        if s == 0:
            raise BothZero("atan(0/0) is undefined")
        return half_pi(ctx, s * zero_side)
    if _is_exact(lam) and lam == 0:
        return BoundedReal(mp.mpf(0), mp.mpf(0))
    if _is_exact(lam) and _is_exact(x):
        t = ExactScalar.coerce(lam) / x
        tv = mp.mpf(t.r.numerator) / t.r.denominator
        if t.n != 1:
            tv *= mp.sqrt(t.n)
        v = mp.atan(tv)
        # |d atan(t)/dt * t| <= 1/2, so a few relative ulps in t stay a few absolute ulps
        return BoundedReal(v, 16 * _ulp(mp))
    num = ctx.exact(lam) if not isinstance(lam, BoundedReal) else lam
    den = ctx.exact(x) if not isinstance(x, BoundedReal) else x
    t = num / den
    v = mp.atan(t.value)
    # atan is 1-Lipschitz
    return BoundedReal(v, _pad(t.err + 16 * _ulp(mp), mp))


def tan_bounded(theta: BoundedReal, ctx: PrecisionContext) -> BoundedReal:
    """tan of an enclosed angle in (-pi/2, pi/2), with a Lipschitz-bounded radius."""
    mp = ctx.mp
    hp = half_pi(ctx)
    if abs(theta.value) + theta.err >= hp.value - hp.err:
        raise ValueError("angle must satisfy |theta| < pi/2")
    v = mp.tan(theta.value)
    worst = mp.tan(abs(theta.value) + theta.err)
    slope = 1 + worst * worst
    return BoundedReal(v, _pad(slope * theta.err + abs(v) * 8 * _ulp(mp), mp))


def _effective_sign(v, zero_side: int) -> int:
    s = _exact_sign(v)
    return zero_side if s == 0 else s


def sub_branch_ok(lam, x, y, zero_side: int = 1) -> bool:
    """Whether atan(lam/x) - atan(lam/y) equals atan(lam(y-x)/(xy+lam^2)) with no pi shift.

    Holds iff lam^2/(xy) > -1. A zero x or y is read as 0 approached from
    ``zero_side``; on lam^2 == -xy the zero-denominator convention picks the
    wrong half-turn, so the boundary is excluded.
    """
    if _exact_sign(lam) == 0:
        return True
    sx, sy = _effective_sign(x, zero_side), _effective_sign(y, zero_side)
    if sx * sy > 0:
        return True
    if _exact_sign(x) == 0 or _exact_sign(y) == 0:
        return False
    return _exact_sign(_square(lam) + x * y) < 0


def add_branch_ok(lam, x, y, zero_side: int = 1) -> bool:
    """Whether atan(lam/x) + atan(lam/y) equals atan(lam(x+y)/(xy-lam^2)) with no pi shift.

    Holds iff lam^2/(xy) < 1. On xy == lam^2 the zero-denominator convention
    returns the correct sign(lam/x)*pi/2, so the boundary counts as holding.
    """
    if _exact_sign(lam) == 0:
        return True
    sx, sy = _effective_sign(x, zero_side), _effective_sign(y, zero_side)
    if sx * sy < 0:
        return True
    if _exact_sign(x) == 0 or _exact_sign(y) == 0:
        return False
    return _exact_sign(x * y - _square(lam)) >= 0


def _square(lam):
    if isinstance(lam, ExactScalar):
        return lam.square()
    return lam * lam


def arctan_sub(lam, x, y, ctx: PrecisionContext, zero_side: int = 1) -> tuple[Angle, bool]:
    """atan(lam(y-x)/(xy+lam^2)) and whether it equals atan(lam/x) - atan(lam/y)."""
    ok = sub_branch_ok(lam, x, y, zero_side)
    if _exact_sign(lam) == 0:
        return BoundedReal(ctx.mp.mpf(0), ctx.mp.mpf(0)), True
    num = lam * (y - x)
    den = x * y + _square(lam)
    return arctan_ratio(num, den, ctx), ok


def arctan_add(lam, x, y, ctx: PrecisionContext, zero_side: int = 1) -> tuple[Angle, bool]:
    """atan(lam(x+y)/(xy-lam^2)) and whether it equals atan(lam/x) + atan(lam/y).

    Raises DenominatorZero when ``x*y == lam**2``.
    """
    if _exact_sign(lam) == 0:
        return BoundedReal(ctx.mp.mpf(0), ctx.mp.mpf(0)), True
    den = x * y - _square(lam)
    if _exact_sign(den) == 0:
        raise DenominatorZero(f"x*y == lam^2 for lam={lam}, x={x}, y={y}")
    ok = add_branch_ok(lam, x, y, zero_side)
    return arctan_ratio(lam * (x + y), den, ctx), ok
