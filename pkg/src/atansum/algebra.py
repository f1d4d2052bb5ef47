"""Exact audit of the arctangent arguments that each lemma instantiation produces.

Every arctangent in a summand has an argument that is a rational function of k
(times alpha, which may be a quadratic surd). :func:`lhs_argument` derives it
from the configuration; :func:`check_printed_form` compares it with a printed
form by cross-multiplication.
"""

from __future__ import annotations

from .exact import ExactScalar, Poly
from .parser import (
    ExprSyntaxError,
    parse_closed_form,
    parse_expr,
    parse_rational_function,
    parse_scalar,
    parse_sequence,
)
from .rational import RationalFunction, SurdNotReducible
from .telescope import LemmaConfig, LemmaVariant

__all__ = [
    "ExprSyntaxError",
    "RationalFunction",
    "SurdNotReducible",
    "check_printed_form",
    "lhs_argument",
    "parse_closed_form",
    "parse_expr",
    "parse_rational_function",
    "parse_scalar",
    "parse_sequence",
    "slots",
]


def slots(cfg: LemmaConfig) -> list[str]:
    """Names of the arctangent slots in one summand.

    ``main`` is the combined argument (difference form, or the sum form for
    L2_ODD); ``second`` is the sum form of LP/LPALT; ``cof1`` .. ``cof{m-1}``
    are the cofactor arguments alpha/f(k + j*stride).
    """
    names = ["main"]
    if cfg.variant.squared:
        names.append("second")
    names.extend(f"cof{j}" for j in range(1, cfg.m))
    return names


def _alpha(cfg: LemmaConfig) -> RationalFunction:
    if not isinstance(cfg.alpha, ExactScalar):
        raise SurdNotReducible(f"alpha={cfg.alpha} is not an exact quadratic surd")
    return RationalFunction.coerce(cfg.alpha)


def lhs_argument(cfg: LemmaConfig, slot: str) -> RationalFunction:
    """The reduced argument of one arctangent slot, as a function of k."""
    alpha = _alpha(cfg)
    a2 = RationalFunction.coerce(cfg.alpha.square())
    fk = cfg.f.poly()
    fx = RationalFunction(fk)
    if slot.startswith("cof"):
        try:
            j = int(slot[3:])
        except ValueError:
            raise KeyError(f"unknown slot {slot!r}") from None
        if not 1 <= j < cfg.m:
            raise KeyError(f"slot {slot!r} out of range for m={cfg.m}")
        return alpha / RationalFunction(fk.shift(j * cfg.stride))
    fy = RationalFunction(fk.shift(cfg.shift))
    difference = alpha * (fy - fx) / (fx * fy + a2)
    total = alpha * (fy + fx) / (fx * fy - a2)
    if slot == "main":
        return total if cfg.variant is LemmaVariant.L2_ODD else difference
    if slot == "second" and cfg.variant.squared:
        return total
    raise KeyError(f"unknown slot {slot!r} for {cfg.variant.value}")


def check_printed_form(cfg: LemmaConfig, slot: str, printed: RationalFunction) -> bool:
    """Exact equality of the derived and printed arguments (cross-multiplied)."""
    derived = lhs_argument(cfg, slot)
    printed = RationalFunction.coerce(printed)
    if derived.surd != printed.surd and not (derived.is_zero() or printed.is_zero()):
        return False
    return derived.num * printed.den == printed.num * derived.den


def as_poly(text: str) -> Poly:
    """Parse a polynomial in k."""
    rf = parse_rational_function(text)
    return rf.as_poly()
