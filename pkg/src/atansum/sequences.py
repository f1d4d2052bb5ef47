"""Index sequences f(k) = base(k)**power with exact rational polynomial bases."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import Poly


class NeverMonotone(ValueError):
    """No index k0 <= k_max starts a positive, non-decreasing run of f."""


@dataclass(frozen=True)
class SequenceSpec:
    """f(k) = base(k) ** power.

    The base must have degree >= 1 and a positive leading coefficient so that
    f(k) grows without bound; early indices may still be zero or negative.
    """

    base: Poly
    power: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.base, Poly):
            raise TypeError("base must be a Poly")
        if self.power < 1:
            raise ValueError(f"power must be a positive integer, got {self.power}")
        if self.base.degree < 1:
            raise ValueError(f"base must have degree >= 1, got {self.base}")
        if self.base.lead <= 0:
            raise ValueError(f"leading coefficient of {self.base} must be positive")

    @classmethod
    def from_coeffs(cls, *coeffs, power: int = 1) -> "SequenceSpec":
        """Build from coefficients, lowest degree first."""
        return cls(Poly(coeffs), power)

    def poly(self) -> Poly:
        """The expanded polynomial base**power."""
        return self.base ** self.power

    @property
    def degree(self) -> int:
        return self.base.degree * self.power

    def __call__(self, k) -> Fraction:
        return self.base(k) ** self.power

    def __str__(self) -> str:
        if self.power == 1:
            return str(self.base)
        return f"({self.base})^{self.power}"


def eval_seq(f: SequenceSpec, k: int) -> Fraction:
    """Exact value f(k) for a positive index k."""
    if k < 1:
        raise ValueError(f"index must be >= 1, got {k}")
    return f(k)


@dataclass(frozen=True)
class Violation:
    k: int
    kind: str  # "non-positive" or "decreasing"
    value: Fraction

    def __str__(self) -> str:
        if self.kind == "decreasing":
            return f"f({self.k + 1}) < f({self.k})"
        return f"f({self.k}) = {self.value} <= 0"


@dataclass(frozen=True)
class HypothesisReport:
    """Where f starts being positive and non-decreasing for good.

    ``k0`` is the first index with f(k) > 0 and f(k+1) >= f(k) for every
    k >= k0. ``positive_from`` and ``monotone_from`` give the two conditions
    separately. ``violations`` lists each failure below k0.
    """

    k0: int
    positive_from: int
    monotone_from: int
    violations: tuple[Violation, ...] = field(default_factory=tuple)
    scanned_to: int = 0

    @property
    def clean(self) -> bool:
        return not self.violations


def tail_bound(f: SequenceSpec) -> int:
    """An index beyond which base and its derivative are both positive.

    Past every real root of base and of base' (Cauchy bounds), the base is
    increasing and positive, hence so is any positive power of it.
    """
    b = f.base
    bound = max(b.cauchy_bound(), b.derivative().cauchy_bound())
    return math.floor(bound) + 1


def hypothesis_report(f: SequenceSpec, k_max: int) -> HypothesisReport:
    """Check the lemma hypothesis "f positive and non-decreasing" exactly.

    Indices up to ``max(k_max, tail_bound(f))`` are scanned with exact
    arithmetic; beyond that the root bounds guarantee the property.
    """
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    top = max(k_max, tail_bound(f))
    values = [f(k) for k in range(1, top + 2)]  # values[i] = f(i+1)

    positive_from = 1
    monotone_from = 1
    for k in range(top, 0, -1):
        if values[k - 1] <= 0:
            positive_from = k + 1
            break
    for k in range(top, 0, -1):
        if values[k] < values[k - 1]:
            monotone_from = k + 1
            break
    k0 = max(positive_from, monotone_from)
    if k0 > k_max:
        raise NeverMonotone(f"{f} is not positive and non-decreasing from any k <= {k_max} (k0 = {k0})")

    violations: list[Violation] = []
    for k in range(1, k0):
        if values[k - 1] <= 0:
            violations.append(Violation(k, "non-positive", values[k - 1]))
        if values[k] < values[k - 1]:
            violations.append(Violation(k, "decreasing", values[k] - values[k - 1]))
    return HypothesisReport(k0, positive_from, monotone_from, tuple(violations), top)
