"""Reduced rational functions of k over Q, optionally scaled by one square root."""

from __future__ import annotations

from fractions import Fraction

from .exact import ExactScalar, Poly, _squarefree_split, poly_gcd


class SurdNotReducible(ValueError):
    """An expression mixes different square roots, or needs an irrational alpha^2."""


class RationalFunction:
    """``sqrt(surd) * num(k) / den(k)`` in lowest terms with a monic denominator."""

    __slots__ = ("num", "den", "surd")

    def __init__(self, num: Poly, den: Poly | None = None, surd: int = 1):
        den = Poly.const(1) if den is None else den
        if den.is_zero():
            raise ZeroDivisionError("zero denominator polynomial")
        s, surd = _squarefree_split(int(surd))
        num = num * s
        if num.is_zero():
            self.num, self.den, self.surd = Poly(), Poly.const(1), 1
            return
        g = poly_gcd(num, den)
        num, den = num // g, den // g
        lead = den.lead
        self.num, self.den, self.surd = num * (1 / lead), den * (1 / lead), surd

    @classmethod
    def coerce(cls, x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, Poly):
            return cls(x)
        if isinstance(x, (int, Fraction)):
            return cls(Poly.const(x))
        if isinstance(x, ExactScalar):
            return cls(Poly.const(x.r), surd=x.n)
        raise TypeError(f"cannot convert {type(x).__name__} to RationalFunction")

    @classmethod
    def k(cls) -> "RationalFunction":
        return cls(Poly.k())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree == 0 and self.surd == 1

    def as_poly(self) -> Poly:
        if not self.is_poly():
            raise ValueError(f"{self} is not a polynomial")
        return self.num

    def is_const(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def as_scalar(self) -> ExactScalar:
        if not self.is_const():
            raise ValueError(f"{self} depends on k")
        return ExactScalar(self.num.const_value(), self.surd)

    def __call__(self, k) -> ExactScalar:
        d = self.den(k)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at k={k}")
        return ExactScalar(self.num(k) / d, self.surd)

    def __add__(self, other) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.surd != other.surd:
            raise SurdNotReducible(f"cannot add sqrt({self.surd}) and sqrt({other.surd}) terms")
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den, self.surd)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, self.surd)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-RationalFunction.coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return RationalFunction.coerce(other) - self

    def __mul__(self, other) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den, self.surd * other.surd)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = RationalFunction.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        # 1/sqrt(n) = sqrt(n)/n
        return RationalFunction(self.num * other.den, self.den * other.num * other.surd,
                                self.surd * other.surd)

    def __rtruediv__(self, other) -> "RationalFunction":
        return RationalFunction.coerce(other) / self

    def __pow__(self, e: int) -> "RationalFunction":
        if e < 0:
            return RationalFunction.coerce(1) / (self ** -e)
        result = RationalFunction.coerce(1)
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.num, self.den, self.surd) == (other.num, other.den, other.surd)

    def __hash__(self) -> int:
        return hash((self.num, self.den, self.surd))

    def __str__(self) -> str:
        num = str(self.num)
        if self.surd != 1:
            num = f"sqrt({self.surd})*({num})"
        if self.den == Poly.const(1):
            return num
        if self.surd == 1:
            num = f"({num})"
        return f"{num}/({self.den})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"
