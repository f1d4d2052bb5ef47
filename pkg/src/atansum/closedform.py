"""Exact closed forms: sums of c * pi^p * prod atan(s_i)^e_i with exact scalars s_i.

The atom :data:`HALF_PI` stands for ``atan(lam/0) = pi/2`` as produced by the
boundary products; :func:`simplify` turns it (and the other whitelisted
special values) into powers of pi.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .exact import ExactScalar, _fmt_fraction
from .numerics import BoundedReal, PrecisionContext, arctan_ratio, pi_const


class _HalfPi:
    """Singleton atom for a boundary factor atan(lam/0)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "HALF_PI"

    def __reduce__(self):
        return (_HalfPi, ())


HALF_PI = _HalfPi()

Atom = Union[ExactScalar, _HalfPi]
# A term key: (pi_power, ((atom, exponent), ...)) with atoms in canonical order.
TermKey = tuple[int, tuple[tuple[Atom, int], ...]]


def _atom_key(atom: Atom):
    if atom is HALF_PI:
        return (0, 0, Fraction(0))
    return (1, atom.n, atom.r)


def _term_sort_key(key: TermKey):
    pi_power, atoms = key
    return (-pi_power, len(atoms), [(_atom_key(a), e) for a, e in atoms])


def _canon_atoms(atoms: Iterable[tuple[Atom, int]]) -> tuple[int, tuple[tuple[Atom, int], ...]]:
    """Merge repeated atoms and pull signs out via oddness of atan.

    Returns (sign, canonical atom tuple).
    """
    merged: dict[Atom, int] = defaultdict(int)
    sign = 1
    for atom, e in atoms:
        if e < 0:
            raise ValueError("negative arctangent exponent")
        if e == 0:
            continue
        if atom is not HALF_PI:
            atom = ExactScalar.coerce(atom)
            if atom.sign() < 0:
                atom = -atom
                if e % 2:
                    sign = -sign
        merged[atom] += e
    ordered = tuple(sorted(merged.items(), key=lambda ae: _atom_key(ae[0])))
    return sign, ordered


class ClosedFormExpr:
    """Immutable exact expression; like terms are always merged."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[TermKey, Fraction] | Iterable[tuple[Fraction, int, Iterable]] = ()):
        acc: dict[TermKey, Fraction] = defaultdict(Fraction)
        items = terms.items() if isinstance(terms, Mapping) else (
            ((p, a), c) for c, p, a in terms)
        for (pi_power, atoms), coeff in items:
            if pi_power < 0:
                raise ValueError("negative power of pi")
            sign, canon = _canon_atoms(atoms)
            acc[(pi_power, canon)] += sign * Fraction(coeff)
        self.terms: tuple[tuple[TermKey, Fraction], ...] = tuple(
            (key, acc[key]) for key in sorted(acc, key=_term_sort_key) if acc[key] != 0)

    # construction helpers
    @classmethod
    def const(cls, c) -> "ClosedFormExpr":
        return cls([(Fraction(c), 0, ())])

    @classmethod
    def pi(cls, power: int = 1, coeff=1) -> "ClosedFormExpr":
        return cls([(Fraction(coeff), power, ())])

    @classmethod
    def atan(cls, arg: "ExactScalar | int | Fraction") -> "ClosedFormExpr":
        return cls([(Fraction(1), 0, ((ExactScalar.coerce(arg), 1),))])

    @classmethod
    def half_pi_atom(cls) -> "ClosedFormExpr":
        return cls([(Fraction(1), 0, ((HALF_PI, 1),))])

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(key == (0, ()) for key, _ in self.terms)

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError(f"{self} is not a rational constant")
        return self.terms[0][1] if self.terms else Fraction(0)

    # arithmetic
    def _coerce(self, other) -> "ClosedFormExpr":
        if isinstance(other, ClosedFormExpr):
            return other
        if isinstance(other, (int, Fraction)):
            return ClosedFormExpr.const(other)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def __add__(self, other) -> "ClosedFormExpr":
        other = self._coerce(other)
        return ClosedFormExpr(list(self._triples()) + list(other._triples()))

    __radd__ = __add__

    def __neg__(self) -> "ClosedFormExpr":
        return ClosedFormExpr([(-c, p, a) for c, p, a in self._triples()])

    def __sub__(self, other) -> "ClosedFormExpr":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "ClosedFormExpr":
        return self._coerce(other) - self

    def __mul__(self, other) -> "ClosedFormExpr":
        other = self._coerce(other)
        out = []
        for c1, p1, a1 in self._triples():
            for c2, p2, a2 in other._triples():
                out.append((c1 * c2, p1 + p2, a1 + a2))
        return ClosedFormExpr(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ClosedFormExpr":
        if isinstance(other, ClosedFormExpr):
            other = other.const_value()
        other = Fraction(other)
        if other == 0:
            raise ZeroDivisionError("closed form divided by zero")
        return self * (1 / other)

    def __pow__(self, e: int) -> "ClosedFormExpr":
        if not isinstance(e, int) or e < 0:
            raise ValueError("closed forms support non-negative integer powers only")
        result = ClosedFormExpr.const(1)
        for _ in range(e):
            result = result * self
        return result

    def _triples(self):
        for (p, atoms), c in self.terms:
            yield c, p, atoms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ClosedFormExpr.const(other)
        if not isinstance(other, ClosedFormExpr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        return f"ClosedFormExpr({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (c, p, atoms) in enumerate(self._triples()):
            factors = []
            if p == 1:
                factors.append("pi")
            elif p > 1:
                factors.append(f"pi^{p}")
            for atom, e in atoms:
                base = "(pi/2)" if atom is HALF_PI else f"atan({atom})"
                factors.append(base if e == 1 else f"{base}^{e}")
            mag = abs(c)
            if not factors:
                body = _fmt_fraction(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = _fmt_fraction(mag) + "*" + "*".join(factors)
            if i == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)


# atan(s) = pi / d for these exact scalars s (s > 0 after canonicalisation).
_SPECIAL = {
    ExactScalar(1): Fraction(1, 4),
    ExactScalar(1, 3): Fraction(1, 3),
    ExactScalar(Fraction(1, 3), 3): Fraction(1, 6),
}


def simplify(e: ClosedFormExpr) -> ClosedFormExpr:
    """Rewrite into a canonical exact form.

    Applies atan(0)=0, atan(1)=pi/4, atan(sqrt3)=pi/3, atan(sqrt3/3)=pi/6 and
    HALF_PI=pi/2, merges like terms, and combines pairs of lone arctangents
    with equal or opposite coefficients by the exact two-angle formulas
    (including the pi correction when the product of arguments exceeds 1).
    Idempotent.
    """
    current = _rewrite_specials(e)
    while True:
        merged = _merge_one_pair(current)
        if merged is None:
            return current
        current = _rewrite_specials(merged)


def _rewrite_specials(e: ClosedFormExpr) -> ClosedFormExpr:
    out = []
    for c, p, atoms in e._triples():
        kept = []
        for atom, k in atoms:
            if atom is HALF_PI:
                c *= Fraction(1, 2) ** k
                p += k
            elif not atom:
                c = Fraction(0)
            elif atom in _SPECIAL:
                c *= _SPECIAL[atom] ** k
                p += k
            else:
                kept.append((atom, k))
        if c:
            out.append((c, p, tuple(kept)))
    return ClosedFormExpr(out)


def _merge_one_pair(e: ClosedFormExpr) -> "ClosedFormExpr | None":
    triples = list(e._triples())
    lone = [i for i, (c, p, atoms) in enumerate(triples)
            if p == 0 and len(atoms) == 1 and atoms[0][1] == 1]
    for ii, i in enumerate(lone):
        ci, _, ((a, _),) = triples[i]
        for j in lone[ii + 1:]:
            cj, _, ((b, _),) = triples[j]
            if a.n != b.n or abs(ci) != abs(cj):
                continue
            # a, b > 0 after canonicalisation, and ab is rational.
            ab = (a * b).as_fraction()
            rest = [t for idx, t in enumerate(triples) if idx not in (i, j)]
            if ci == cj:
                if ab == 1:
                    rest.append((ci / 2, 1, ()))
                else:
                    rest.append((ci, 0, (((a + b) / (1 - ab), 1),)))
                    if ab > 1:
                        rest.append((ci, 1, ()))
            else:
                rest.append((ci, 0, (((a - b) / (1 + ab), 1),)))
            return ClosedFormExpr(rest)
    return None


def eval_expr(e: ClosedFormExpr, ctx: PrecisionContext) -> BoundedReal:
    """Numeric value with a certified radius."""
    mp = ctx.mp
    pi = pi_const(ctx)
    total = BoundedReal(mp.mpf(0), mp.mpf(0))
    for c, p, atoms in e._triples():
        term = ctx.exact(c) * (pi ** p)
        for atom, k in atoms:
            if atom is HALF_PI:
                v = BoundedReal(pi.value / 2, pi.err / 2)
            else:
                v = arctan_ratio(atom, 1, ctx)
            term = term * (v ** k)
        total = total + term
    return total


def expr_equal(a: ClosedFormExpr, b: ClosedFormExpr, ctx: PrecisionContext) -> bool:
    """Numerical equality within the combined certified radius."""
    va, vb = eval_expr(a, ctx), eval_expr(b, ctx)
    return abs(va.value - vb.value) <= va.err + vb.err
