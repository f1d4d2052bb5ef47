"""Certified evaluation of telescoping arctangent series and their closed forms."""

from .algebra import check_printed_form, lhs_argument
from .closedform import ClosedFormExpr, eval_expr, simplify
from .exact import ExactScalar, Poly
from .numerics import BoundedReal, PrecisionContext, arctan_add, arctan_ratio, arctan_sub, pi_const
from .parser import ExprSyntaxError, parse_closed_form, parse_expr, parse_rational_function, parse_scalar, parse_sequence
from .rational import RationalFunction
from .sequences import SequenceSpec, hypothesis_report
from .telescope import (
    Engine,
    Evaluation,
    InvalidConfig,
    LemmaConfig,
    LemmaVariant,
    evaluate,
    partial_sum_boundary,
    partial_sum_direct,
    rhs_exact,
    tail_remainder,
    telescoping_residual,
)

__version__ = "1.0.0"

__all__ = [
    "BoundedReal", "ClosedFormExpr", "Engine", "Evaluation", "ExactScalar", "ExprSyntaxError",
    "InvalidConfig", "LemmaConfig", "LemmaVariant", "Poly", "PrecisionContext", "RationalFunction",
    "SequenceSpec", "arctan_add", "arctan_ratio", "arctan_sub", "check_printed_form", "eval_expr",
    "evaluate", "hypothesis_report", "lhs_argument", "parse_closed_form", "parse_expr",
    "parse_rational_function", "parse_scalar", "parse_sequence", "partial_sum_boundary",
    "partial_sum_direct", "pi_const", "rhs_exact", "simplify", "tail_remainder", "telescoping_residual",
]
