"""Exact scalars and dense univariate polynomials over the rationals.

Everything here is pure and immutable; nothing rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import isqrt
from typing import Iterable, Union

Rational = Union[int, Fraction]


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, m) with n == s*s*m and m square-free."""
    if n < 0:
        raise ValueError(f"negative radicand {n}")
    if n == 0:
        return 0, 1
    s, m = 1, n
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            s *= p
        p += 1
    return s, m


def _sign(x: Rational) -> int:
    return (x > 0) - (x < 0)


@total_ordering
@dataclass(frozen=True)
class ExactScalar:
    """The real number ``r * sqrt(n)`` with ``r`` rational and ``n`` square-free."""

    r: Fraction
    n: int = 1

    def __post_init__(self) -> None:
        r = Fraction(self.r)
        s, m = _squarefree_split(int(self.n))
        r *= s
        if r == 0:
            m = 1
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "n", m)

    @classmethod
    def coerce(cls, x: "ExactScalar | Rational") -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(Fraction(x))
        raise TypeError(f"cannot convert {type(x).__name__} to ExactScalar")

    @classmethod
    def sqrt(cls, q: Rational) -> "ExactScalar":
        """Exact square root of a non-negative rational."""
        q = Fraction(q)
        if q < 0:
            raise ValueError(f"sqrt of negative number {q}")
        # sqrt(a/b) = sqrt(a*b)/b
        return cls(Fraction(1, q.denominator), q.numerator * q.denominator)

    @property
    def is_rational(self) -> bool:
        return self.n == 1

    def square(self) -> Fraction:
        return self.r * self.r * self.n

    def sign(self) -> int:
        return _sign(self.r)

    def as_fraction(self) -> Fraction:
        if self.n != 1:
            raise ValueError(f"{self} is irrational")
        return self.r

    def __bool__(self) -> bool:
        return self.r != 0

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(-self.r, self.n)

    def __abs__(self) -> "ExactScalar":
        return ExactScalar(abs(self.r), self.n)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ExactScalar(self.r * other, self.n)
        if isinstance(other, ExactScalar):
            return ExactScalar(self.r * other.r, self.n * other.n)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("ExactScalar division by zero")
            return ExactScalar(self.r / other, self.n)
        if isinstance(other, ExactScalar):
            if not other:
                raise ZeroDivisionError("ExactScalar division by zero")
            # r1 sqrt(n1) / (r2 sqrt(n2)) = r1/(r2 n2) * sqrt(n1 n2)
            return ExactScalar(self.r / (other.r * other.n), self.n * other.n)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return ExactScalar(Fraction(other)) / self
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ExactScalar(Fraction(other))
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if not other:
            return self
        if not self:
            return other
        if self.n != other.n:
            raise ValueError(f"cannot add {self} and {other} exactly")
        return ExactScalar(self.r + other.r, self.n)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self + (-ExactScalar.coerce(other))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.n == 1 and self.r == other
        if isinstance(other, ExactScalar):
            return self.r == other.r and self.n == other.n
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.r, self.n))

    def __lt__(self, other) -> bool:
        other = ExactScalar.coerce(other)
        sa, sb = self.sign(), other.sign()
        if sa != sb:
            return sa < sb
        a2, b2 = self.square(), other.square()
        return a2 < b2 if sa >= 0 else a2 > b2

    def __float__(self) -> float:
        return float(self.r) * (self.n ** 0.5)

    def __str__(self) -> str:
        if self.n == 1:
            return _fmt_fraction(self.r)
        root = f"sqrt({self.n})"
        if self.r == 1:
            return root
        if self.r == -1:
            return "-" + root
        return f"{_fmt_fraction(self.r)}*{root}"

    def __repr__(self) -> str:
        return f"ExactScalar({self})"


def _fmt_fraction(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class Poly:
    """Dense polynomial in ``k`` with Fraction coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Rational] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def const(cls, c: Rational) -> "Poly":
        return cls((c,))

    @classmethod
    def k(cls) -> "Poly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return self.degree <= 0

    def const_value(self) -> Fraction:
        if self.degree > 0:
            raise ValueError(f"{self} is not constant")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __call__(self, x: Rational) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs])
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative polynomial power")
        result, base = Poly.const(1), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / other.lead
            if c:
                quot[i - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return Poly(quot), Poly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other) -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Poly":
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self * (1 / self.lead)

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def shift(self, s: Rational) -> "Poly":
        """The polynomial ``k -> p(k + s)``."""
        result = Poly()
        arg = Poly((s, 1))
        for c in reversed(self.coeffs):
            result = result * arg + c
        return result

    def cauchy_bound(self) -> Fraction:
        """Every real root has absolute value below this bound."""
        if self.degree < 1:
            return Fraction(0)
        return 1 + max(abs(c / self.lead) for c in self.coeffs[:-1])

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts: list[str] = []
        for e in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[e]
            if c == 0:
                continue
            neg = c < 0
            a = abs(c)
            if e == 0:
                body = _fmt_fraction(a)
            else:
                mono = "k" if e == 1 else f"k^{e}"
                body = mono if a == 1 else f"{_fmt_fraction(a)}*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("-" if neg else "+") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self})"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor (Euclid over Q)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()
