"""The telescoping engines behind every identity in the catalog.

For a configuration (variant, f, alpha, m, q) let A(k) = atan(alpha/f(k)) and
let the boundary product be

    B(k) = prod_{j<m} A(k + j*s)        (L1, L2_EVEN, L2_ODD)
    B(k) = prod_{j<m} A(k + j*s)^2      (LP, LPALT)

with stride s = q (2q for LPALT). With the signed boundary
S(k) = (-1)^(k-1) B(k) for the alternating variants (S = B otherwise),
each summand equals S(k) - S(k+s) once the two-arctangent formulas apply,
so the series sums to S(1) + ... + S(s) and the tail after N terms is exactly
S(N+1) + ... + S(N+s).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Union

from .closedform import HALF_PI, ClosedFormExpr, eval_expr, simplify
from .exact import ExactScalar
from .numerics import (
    Angle,
    BoundedReal,
    BothZero,
    PrecisionContext,
    add_branch_ok,
    arctan_ratio,
    sub_branch_ok,
)
from .sequences import SequenceSpec, hypothesis_report, tail_bound

Alpha = Union[ExactScalar, BoundedReal]

DEFAULT_MAX_TERMS = 1000


class InvalidConfig(ValueError):
    """A lemma configuration violates its own structural constraints."""


class NotInMonotoneRegime(ValueError):
    """The requested index lies before the regime where the tail formula is proven."""


class LemmaVariant(str, enum.Enum):
    L1 = "L1"
    LP = "LP"
    L2_EVEN = "L2_EVEN"
    L2_ODD = "L2_ODD"
    LPALT = "LPALT"

    @property
    def alternating(self) -> bool:
        return self in (LemmaVariant.L2_EVEN, LemmaVariant.L2_ODD, LemmaVariant.LPALT)

    @property
    def squared(self) -> bool:
        return self in (LemmaVariant.LP, LemmaVariant.LPALT)

    @property
    def uses_sum(self) -> bool:
        """Whether a summand contains the two-arctangent *sum* form."""
        return self in (LemmaVariant.LP, LemmaVariant.L2_ODD, LemmaVariant.LPALT)

    @property
    def uses_difference(self) -> bool:
        return self is not LemmaVariant.L2_ODD


def default_zero_side(variant: "LemmaVariant | str") -> int:
    """-1 for L2_ODD (sum form only), +1 for the variants using the difference form."""
    return -1 if LemmaVariant(variant) is LemmaVariant.L2_ODD else 1


@dataclass(frozen=True)
class LemmaConfig:
    """One instantiation of a lemma.

    ``zero_side`` fixes the reading of atan(alpha/0): +1 gives sign(alpha)*pi/2,
    -1 the opposite half-turn. By default it follows the combined formula of
    the variant: the difference form atan(alpha(y-x)/(xy+alpha^2)) tends to
    +sign(alpha)*pi/2 - atan(alpha/y) as x -> 0, the sum form used alone by
    L2_ODD to -sign(alpha)*pi/2 + atan(alpha/y).
    """

    variant: LemmaVariant
    f: SequenceSpec
    alpha: Alpha
    m: int = 1
    q: int = 1
    zero_side: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", LemmaVariant(self.variant))
        if self.zero_side is None:
            object.__setattr__(self, "zero_side", default_zero_side(self.variant))
        if not isinstance(self.alpha, (ExactScalar, BoundedReal)):
            object.__setattr__(self, "alpha", ExactScalar.coerce(self.alpha))
        if self.m < 1:
            raise InvalidConfig(f"m must be a positive integer, got {self.m}")
        if self.q < 1:
            raise InvalidConfig(f"q must be a positive integer, got {self.q}")
        if self.variant is LemmaVariant.L2_EVEN and self.q % 2:
            raise InvalidConfig(f"L2_EVEN requires q even, got q={self.q}")
        if self.variant is LemmaVariant.L2_ODD and self.q % 2 == 0:
            raise InvalidConfig(f"L2_ODD requires q odd, got q={self.q}")
        if self.zero_side not in (1, -1):
            raise InvalidConfig(f"zero_side must be +1 or -1, got {self.zero_side}")

    @property
    def stride(self) -> int:
        return 2 * self.q if self.variant is LemmaVariant.LPALT else self.q

    @property
    def shift(self) -> int:
        """The M in f(k+M) of the main argument: m*q (2mq for LPALT)."""
        return self.m * self.stride

    @property
    def exact_alpha(self) -> bool:
        return isinstance(self.alpha, ExactScalar)

    def with_alpha(self, alpha: Alpha) -> "LemmaConfig":
        return replace(self, alpha=alpha)

    def describe(self) -> str:
        return (f"{self.variant.value}(f={self.f}, alpha={self.alpha}, m={self.m}, q={self.q}"
                + ("" if self.zero_side == default_zero_side(self.variant)
                   else f", zero_side={self.zero_side}") + ")")


@dataclass(frozen=True)
class TermValue:
    """The k-th summand and whether the two-arctangent formulas applied there."""

    k: int
    term: Angle
    branch_ok: bool
    denominator_zero: bool = False


def _alpha_sign(alpha: Alpha) -> int:
    return alpha.sign()


def _alpha_sq(alpha: Alpha):
    if isinstance(alpha, ExactScalar):
        return alpha.square()
    return alpha * alpha


class Engine:
    """Evaluates one configuration at one precision, caching A(k).

    Not thread-safe; create one per worker.
    """

    def __init__(self, cfg: LemmaConfig, ctx: PrecisionContext):
        self.cfg = cfg
        self.ctx = ctx
        self._atoms: dict[int, Angle] = {}
        self._mp = ctx.mp
        self._one = BoundedReal(self._mp.mpf(1), self._mp.mpf(0))
        self._zero = BoundedReal(self._mp.mpf(0), self._mp.mpf(0))

    def atom(self, k: int) -> Angle:
        a = self._atoms.get(k)
        if a is None:
            a = arctan_ratio(self.cfg.alpha, self.cfg.f(k), self.ctx, self.cfg.zero_side)
            self._atoms[k] = a
        return a

    def boundary(self, k: int) -> BoundedReal:
        cfg = self.cfg
        prod = self._one
        for j in range(cfg.m):
            a = self.atom(k + j * cfg.stride)
            prod = prod * (a * a if cfg.variant.squared else a)
        return prod

    def signed_boundary(self, k: int) -> BoundedReal:
        b = self.boundary(k)
        if self.cfg.variant.alternating and k % 2 == 0:
            return -b
        return b

    def cofactor(self, k: int) -> BoundedReal:
        cfg = self.cfg
        prod = self._one
        for j in range(1, cfg.m):
            a = self.atom(k + j * cfg.stride)
            prod = prod * (a * a if cfg.variant.squared else a)
        return prod

    def term(self, k: int) -> TermValue:
        cfg = self.cfg
        alpha = cfg.alpha
        if alpha.sign() == 0:
            return TermValue(k, self._zero, True)
        x, y = cfg.f(k), cfg.f(k + cfg.shift)
        zs = cfg.zero_side
        ok = True
        dz = False
        factors = []
        if cfg.variant.uses_difference:
            # atan(alpha/x) - atan(alpha/y)
            factors.append(arctan_ratio(alpha * (y - x), _add(x * y, _alpha_sq(alpha)), self.ctx))
            ok = ok and sub_branch_ok(alpha, x, y, zs)
        if cfg.variant.uses_sum:
            # atan(alpha/x) + atan(alpha/y)
            den = _add(x * y, -_alpha_sq(alpha))
            if _is_zero(den):
                dz = True
            factors.append(arctan_ratio(alpha * (x + y), den, self.ctx))
            ok = ok and add_branch_ok(alpha, x, y, zs)
        value = self.cofactor(k)
        for fac in factors:
            value = fac * value
        if cfg.variant.alternating and k % 2 == 0:
            value = -value
        return TermValue(k, value, ok, dz)

    def residual(self, k: int, term: Optional[TermValue] = None) -> Angle:
        term = term or self.term(k)
        return term.term - (self.signed_boundary(k) - self.signed_boundary(k + self.cfg.stride))

    def head(self) -> BoundedReal:
        """S(1) + ... + S(stride): the value of the whole series."""
        total = self._zero
        for k in range(1, self.cfg.stride + 1):
            total = total + self.signed_boundary(k)
        return total

    def tail(self, n: int) -> BoundedReal:
        """S(n+1) + ... + S(n+stride): the exact sum of all terms after the n-th."""
        total = self._zero
        for k in range(n + 1, n + self.cfg.stride + 1):
            total = total + self.signed_boundary(k)
        return total

    def tail_bound(self, n: int) -> BoundedReal:
        """stride * |B(n+1)|, a bound on the tail inside the monotone regime."""
        b = abs(self.boundary(n + 1))
        return BoundedReal(b.value * self.cfg.stride, b.err * self.cfg.stride)


def _add(a, b):
    # x*y +/- alpha^2 where x*y is rational and alpha^2 rational or bounded
    if isinstance(b, BoundedReal):
        return b + a
    return a + b


def _is_zero(v) -> bool:
    if isinstance(v, BoundedReal):
        return v.value == 0 and v.err == 0
    return v == 0


def _ctx(ctx: Optional[PrecisionContext], digits: int = 30) -> PrecisionContext:
    return ctx if ctx is not None else PrecisionContext(digits)


def atom(cfg: LemmaConfig, k: int, ctx: Optional[PrecisionContext] = None) -> Angle:
    """A(k) = atan(alpha / f(k))."""
    return Engine(cfg, _ctx(ctx)).atom(k)


def boundary(cfg: LemmaConfig, k: int, ctx: Optional[PrecisionContext] = None) -> BoundedReal:
    """B(k): the product of m atoms (squared for LP variants), unsigned."""
    return Engine(cfg, _ctx(ctx)).boundary(k)


def signed_boundary(cfg: LemmaConfig, k: int, ctx: Optional[PrecisionContext] = None) -> BoundedReal:
    return Engine(cfg, _ctx(ctx)).signed_boundary(k)


def lhs_term(cfg: LemmaConfig, k: int, ctx: Optional[PrecisionContext] = None) -> TermValue:
    """The k-th summand exactly as printed in the lemma."""
    if k < 1:
        raise ValueError(f"index must be >= 1, got {k}")
    return Engine(cfg, _ctx(ctx)).term(k)


def telescoping_residual(cfg: LemmaConfig, k: int, ctx: Optional[PrecisionContext] = None) -> Angle:
    """term_k - (S(k) - S(k+stride)); zero whenever the summand telescopes."""
    return Engine(cfg, _ctx(ctx)).residual(k)


def partial_sum_direct(cfg: LemmaConfig, n: int, ctx: Optional[PrecisionContext] = None) -> BoundedReal:
    """Sum of the first n summands, accumulated in ascending k."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    eng = Engine(cfg, _ctx(ctx))
    total = eng._zero
    for k in range(1, n + 1):
        total = total + eng.term(k).term
    return total


def partial_sum_boundary(cfg: LemmaConfig, n: int, ctx: Optional[PrecisionContext] = None) -> BoundedReal:
    """Sum of the first n summands via the boundary formula."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    eng = Engine(cfg, _ctx(ctx))
    return eng.head() - eng.tail(n)


def regime_start(cfg: LemmaConfig) -> int:
    """First index from which the tail formula is guaranteed.

    From k0 on, f is positive and non-decreasing, so every atom has the sign
    of alpha and |A| is non-increasing. Variants using the sum form further
    need f(k) f(k+M) >= alpha^2; that product is increasing in the regime.
    """
    f = cfg.f
    report = hypothesis_report(f, max(2, tail_bound(f) + 1))
    k = report.k0
    if cfg.variant.uses_sum:
        a2 = cfg.alpha.square() if isinstance(cfg.alpha, ExactScalar) else cfg.alpha.upper() ** 2
        while f(k) * f(k + cfg.shift) < a2:
            k += 1
    return k


def tail_remainder(cfg: LemmaConfig, n: int, ctx: Optional[PrecisionContext] = None) -> BoundedReal:
    """Exact value of sum_{k>n} term_k, valid for n in the monotone regime."""
    start = regime_start(cfg)
    if n < start:
        raise NotInMonotoneRegime(f"N={n} is below the monotone regime start {start} for {cfg.describe()}")
    return Engine(cfg, _ctx(ctx)).tail(n)


def rhs_exact(cfg: LemmaConfig, literal_half_pi: bool = False) -> ClosedFormExpr:
    """S(1) + ... + S(stride) as an exact closed form.

    Factors atan(alpha/0) become the HALF_PI atom, signed by sign(alpha) and
    ``zero_side``; with ``literal_half_pi`` they are always +pi/2, as the
    formulas print them.
    """
    if not cfg.exact_alpha:
        raise TypeError("rhs_exact needs an exact alpha")
    alpha: ExactScalar = cfg.alpha
    total = ClosedFormExpr()
    power = 2 if cfg.variant.squared else 1
    for k in range(1, cfg.stride + 1):
        factors = []
        sign = -1 if cfg.variant.alternating and k % 2 == 0 else 1
        for j in range(cfg.m):
            fk = cfg.f(k + j * cfg.stride)
            if fk == 0:
                if not alpha:
                    raise BothZero(f"atan(0/0) at k={k + j * cfg.stride}")
                if not literal_half_pi:
                    sign *= (alpha.sign() * cfg.zero_side) ** power
                factors.append((HALF_PI, power))
            else:
                factors.append((alpha / fk, power))
        total = total + ClosedFormExpr([(Fraction(sign), 0, tuple(factors))])
    return total


@dataclass
class Evaluation:
    """Certified value of one configuration's series and its closed form."""

    lhs: BoundedReal
    rhs: BoundedReal
    rhs_expr: Optional[ClosedFormExpr]
    match: bool
    n_terms: int
    remainder: BoundedReal
    remainder_bound: BoundedReal
    digits: int
    terms: list[TermValue] = field(default_factory=list, repr=False)

    @property
    def difference(self):
        return abs(self.lhs.value - self.rhs.value)


def choose_n(cfg: LemmaConfig, digits: int, engine: Engine, start: int,
             max_terms: int = DEFAULT_MAX_TERMS) -> int:
    """Smallest N >= start with stride*|B(N+1)| < 10^-(digits+2), capped at max_terms.

    Doubling then bisection; sound because |B| is non-increasing past start.
    """
    mp = engine.ctx.mp
    tol = mp.mpf(10) ** (-(digits + 2))

    def small(n: int) -> bool:
        return engine.tail_bound(n).upper() < tol

    cap = max(start, max_terms)
    if small(start):
        return start
    lo, hi = start, start
    while not small(hi):
        if hi >= cap:
            return cap
        lo, hi = hi, min(cap, 2 * hi)
    # small(hi) holds, small(lo) does not
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if small(mid):
            hi = mid
        else:
            lo = mid
    return hi


def evaluate(cfg: LemmaConfig, digits: int = 30, ctx: Optional[PrecisionContext] = None, *,
             max_terms: int = DEFAULT_MAX_TERMS, keep_terms: int = 0,
             engine: Optional[Engine] = None) -> Evaluation:
    """Certified series value: direct sum of N terms plus the exact remainder.

    ``keep_terms`` asks for the first that many TermValues to be returned
    (they are computed anyway when N is at least that large). Passing an
    ``engine`` for ``cfg`` shares its cache of arctangent values.
    """
    if engine is not None:
        if engine.cfg != cfg:
            raise ValueError("engine was built for a different configuration")
        ctx = engine.ctx
    elif ctx is None:
        ctx = PrecisionContext.for_terms(digits, max(max_terms, keep_terms))
    eng = engine or Engine(cfg, ctx)
    start = regime_start(cfg)
    n = choose_n(cfg, digits, eng, start, max_terms)
    total = eng._zero
    kept: list[TermValue] = []
    for k in range(1, max(n, keep_terms) + 1):
        t = eng.term(k)
        if k <= n:
            total = total + t.term
        if k <= keep_terms:
            kept.append(t)
    rem = eng.tail(n)
    lhs = total + rem
    if cfg.exact_alpha:
        expr = rhs_exact(cfg)
        rhs = eval_expr(simplify(expr), ctx)
    else:
        expr = None
        rhs = eng.head()
    match = abs(lhs.value - rhs.value) <= lhs.err + rhs.err
    return Evaluation(lhs, rhs, expr, bool(match), n, rem, eng.tail_bound(n), digits, kept)
