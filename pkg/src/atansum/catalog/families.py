"""Parameterized families: the theorems, the angle expansions and the lemmas.

:func:`family_instantiate` binds a family's parameters and returns a complete
:class:`IdentityRecord`. The printed arguments and the right-hand side are
built from the theorem's own expanded formulas (not from the lemma engine),
so verifying the record cross-checks the two.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Optional

from ..closedform import HALF_PI, ClosedFormExpr, eval_expr
from ..exact import ExactScalar
from ..numerics import BoundedReal, PrecisionContext, Undecidable, pi_const, tan_bounded
from ..parser import ExprSyntaxError, parse_closed_form, parse_rational_function, parse_scalar, parse_sequence
from ..telescope import InvalidConfig, LemmaConfig, LemmaVariant, rhs_exact
from .records import IdentityRecord, PrintedArg


class ConstraintViolation(ValueError):
    """Family parameters violate a stated constraint."""

    def __init__(self, constraint: str, detail: str = ""):
        self.constraint = constraint
        super().__init__(f"constraint violated: {constraint}" + (f" ({detail})" if detail else ""))


class UnknownFamily(KeyError):
    pass


# ---------------------------------------------------------------------------
# template helpers

_PLACEHOLDER = re.compile(r"\{(\w+)\}")


def fill(template: str, values: Mapping[str, Any]) -> str:
    """Replace ``{name}`` by ``(value)``; integers for ``{j}``/``{k}`` stay bare."""

    def sub(m: re.Match) -> str:
        name = m.group(1)
        if name not in values:
            raise KeyError(f"template needs a value for {name!r}")
        return f"({values[name]})"

    return _PLACEHOLDER.sub(sub, template)


_LOOP = re.compile(r"(SUM|PROD)\[([A-Za-z])=([^\]]*?)\.\.([^\]]*)\]\(")


def _int_value(text: str) -> int:
    v = parse_scalar(text)
    if v.n != 1 or v.r.denominator != 1:
        raise ValueError(f"loop bound {text!r} is not an integer")
    return int(v.r)


def expand_loops(text: str) -> str:
    """Expand ``SUM[k=lo..hi](body)`` and ``PROD[j=lo..hi](body)`` into plain text.

    Empty sums become 0, empty products 1; the loop variable is substituted
    as a whole word.
    """
    while True:
        m = _LOOP.search(text)
        if m is None:
            return text
        depth, i = 1, m.end()
        while depth:
            if i >= len(text):
                raise ValueError(f"unbalanced parentheses in {text!r}")
            depth += {"(": 1, ")": -1}.get(text[i], 0)
            i += 1
        body = text[m.end():i - 1]
        kind, var = m.group(1), m.group(2)
        lo, hi = _int_value(m.group(3)), _int_value(m.group(4))
        word = re.compile(rf"\b{var}\b")
        parts = ["(" + word.sub(f"({n})", body) + ")" for n in range(lo, hi + 1)]
        joined = ("+" if kind == "SUM" else "*").join(parts) or ("0" if kind == "SUM" else "1")
        text = text[:m.start()] + f"({joined})" + text[i:]


# ---------------------------------------------------------------------------
# parameter parsing


def _scalar(params: Mapping[str, Any], name: str) -> ExactScalar:
    if name not in params:
        raise ConstraintViolation(f"{name} is required")
    try:
        return parse_scalar(str(params[name]))
    except (ExprSyntaxError, ValueError, ZeroDivisionError) as exc:
        raise ConstraintViolation(f"{name} must be an exact scalar", str(exc)) from exc


def _rational(params: Mapping[str, Any], name: str) -> Fraction:
    v = _scalar(params, name)
    if v.n != 1:
        raise ConstraintViolation(f"{name} must be rational", f"got {v}")
    return v.r


def _posint(params: Mapping[str, Any], name: str) -> int:
    v = _rational(params, name)
    if v.denominator != 1 or v < 1:
        raise ConstraintViolation(f"{name} must be a positive integer", f"got {v}")
    return int(v)


def _fmt(v) -> str:
    return str(v)


# ---------------------------------------------------------------------------
# family definitions


@dataclass(frozen=True)
class Family:
    """A parameterized identity.

    ``build`` receives the raw parameters and returns the bound record.
    """

    name: str
    title: str
    variant: Optional[LemmaVariant]
    params: tuple[str, ...]
    constraints: tuple[str, ...]
    build: Callable[..., IdentityRecord] = field(repr=False)


FAMILIES: dict[str, Family] = {}


def _register(fam: Family) -> Family:
    FAMILIES[fam.name] = fam
    return fam


def _record_id(name: str, values: Mapping[str, Any]) -> str:
    return f"{name}(" + ",".join(f"{k}={v}" for k, v in values.items()) + ")"


def _printed(templates: Mapping[str, str], env: Mapping[str, Any], m: int) -> tuple[PrintedArg, ...]:
    out = []
    for slot, template in templates.items():
        if slot == "cofj":
            for j in range(1, m):
                text = fill(template, {**env, "j": j})
                out.append(PrintedArg(f"cof{j}", text, parse_rational_function(text)))
        else:
            text = fill(template, env)
            out.append(PrintedArg(slot, text, parse_rational_function(text)))
    return tuple(out)


def _finite_sum(alpha: ExactScalar, den: Callable[[int, int], ExactScalar], terms: int, m: int,
                power: int, alternating: bool, zero_side: int) -> ClosedFormExpr:
    """sum_{k=1}^{terms} (+-) prod_{j<m} atan(alpha/den(k, j))^power."""
    total = ClosedFormExpr()
    for k in range(1, terms + 1):
        sign = -1 if alternating and k % 2 == 0 else 1
        factors = []
        for j in range(m):
            d = den(k, j)
            if not d:
                sign *= (alpha.sign() * zero_side) ** power
                factors.append((HALF_PI, power))
            else:
                factors.append((alpha / d, power))
        total = total + ClosedFormExpr([(Fraction(sign), 0, tuple(factors))])
    return total


@dataclass(frozen=True)
class _TheoremSpec:
    name: str
    title: str
    variant: LemmaVariant
    params: tuple[str, ...]
    constraints: tuple[str, ...]
    f: str
    printed: Mapping[str, str]
    rhs_den: str  # the theorem's printed denominator in the RHS, in {k} and {j}
    derive: Optional[Callable[[dict], dict]] = None


def _theorem_builder(spec: _TheoremSpec) -> Callable[..., IdentityRecord]:
    def build(params: Mapping[str, Any], **_: Any) -> IdentityRecord:
        unknown = set(params) - set(spec.params)
        if unknown:
            raise ConstraintViolation(f"unknown parameter(s) {sorted(unknown)} for {spec.name}")
        m, q = _posint(params, "m"), _posint(params, "q")
        values: dict[str, Any] = {"m": m, "q": q}
        if "alpha" in spec.params:
            values["alpha"] = _scalar(params, "alpha")
        if "beta" in spec.params:
            values["beta"] = _rational(params, "beta")
        if spec.derive:
            values.update(spec.derive(values))
        alpha, beta = values["alpha"], values["beta"]
        if "beta >= -1" in spec.constraints and beta < -1:
            raise ConstraintViolation("beta >= -1", f"got beta={beta}")
        if "q odd" in spec.constraints and q % 2 == 0:
            raise ConstraintViolation("q odd", f"got q={q}")
        env = {k: _fmt(v) for k, v in values.items()}
        f = parse_sequence(fill(spec.f, env))
        try:
            cfg = LemmaConfig(spec.variant, f, alpha, m, q)
        except InvalidConfig as exc:
            raise ConstraintViolation(str(exc)) from exc
        den_rf = {}

        def den(k: int, j: int) -> ExactScalar:
            if j not in den_rf:
                den_rf[j] = parse_rational_function(fill(spec.rhs_den, {**env, "j": j, "k": "k"}))
            return den_rf[j](k)

        rhs = _finite_sum(alpha, den, cfg.stride, m, 2 if spec.variant.squared else 1,
                          spec.variant.alternating, cfg.zero_side)
        shown = {p: env[p] for p in spec.params}
        return IdentityRecord(
            id=_record_id(spec.name, shown), family=spec.name, cfg=cfg,
            printed_args=_printed(spec.printed, env, m), rhs=rhs, rhs_text=str(rhs),
            constraints=spec.constraints, notes=(spec.title,), group="family")

    return build


_LIN_MAIN = "({alpha})*({m})*({q})/(k^2+(2*({beta})+({m})*({q}))*k+({beta})*(({beta})+({m})*({q}))+({alpha})^2)"
_LIN_SUM = "({alpha})*(2*k+2*({beta})+({m})*({q}))/(k^2+(2*({beta})+({m})*({q}))*k+({beta})*(({beta})+({m})*({q}))-({alpha})^2)"
_LIN_COF = "({alpha})/(k+({j})*({q})+({beta}))"
_LIN_DEN = "({k})+({j})*({q})+({beta})"
_QUAD_MAIN = "2*({alpha})*({m})*({q})*k/(k^4-(({m})^2*({q})^2-2*({beta}))*k^2+({beta})^2+({alpha})^2)"
_QUAD_SUM = "2*({alpha})*(k^2+({beta}))/(k^4+(2*({beta})-({m})^2*({q})^2)*k^2-({alpha})^2+({beta})^2)"
_QUAD_COF = "({alpha})/(k^2+(2*({j})-({m}))*({q})*k-({q})^2*({j})*(({m})-({j}))+({beta}))"
_QUAD_DEN = "({k})^2+(2*({j})-({m}))*({q})*({k})-({q})^2*({j})*(({m})-({j}))+({beta})"

_THEOREMS = [
    _TheoremSpec("thm.sveqk2u", "Lemma L1 with f(k)=k+beta", LemmaVariant.L1,
                 ("alpha", "beta", "m", "q"), ("beta >= -1",), "k+({beta})",
                 {"main": _LIN_MAIN, "cofj": _LIN_COF}, _LIN_DEN),
    _TheoremSpec("thm.pori4ri", "Lemma L1 with f(k)=k+beta and alpha=mq/2", LemmaVariant.L1,
                 ("beta", "m", "q"), ("beta >= -1",), "k+({beta})",
                 {"main": "2*({m})^2*({q})^2/(2*k+2*({beta})+({m})*({q}))^2",
                  "cofj": "({m})*({q})/(2*(k+({beta})+({j})*({q})))"},
                 _LIN_DEN, lambda v: {"alpha": ExactScalar(Fraction(v["m"] * v["q"], 2))}),
    _TheoremSpec("thm.slsjsoq", "Lemma L1 with f(k)=k^2-mqk+beta", LemmaVariant.L1,
                 ("alpha", "beta", "m", "q"), (), "k^2-({m})*({q})*k+({beta})",
                 {"main": _QUAD_MAIN, "cofj": _QUAD_COF}, _QUAD_DEN),
    _TheoremSpec("thm.ivbxym1", "Lemma LP with f(k)=k+beta", LemmaVariant.LP,
                 ("alpha", "beta", "m", "q"), (), "k+({beta})",
                 {"main": _LIN_MAIN, "second": _LIN_SUM, "cofj": _LIN_COF}, _LIN_DEN),
    _TheoremSpec("thm.lqwviov", "Lemma LP with f(k)=k^2-mqk+beta", LemmaVariant.LP,
                 ("alpha", "beta", "m", "q"), (), "k^2-({m})*({q})*k+({beta})",
                 {"main": _QUAD_MAIN, "second": _QUAD_SUM,
                  "cofj": "({alpha})/(k^2-({q})*k*(({m})-2*({j}))-({q})^2*({j})*(({m})-({j}))+({beta}))"},
                 "({k})^2-({q})*({k})*(({m})-2*({j}))-({q})^2*({j})*(({m})-({j}))+({beta})"),
    _TheoremSpec("cor.lqwviov", "Lemma LP with f(k)=k^2-mqk+m/2 and alpha=m/2", LemmaVariant.LP,
                 ("m", "q"), (), "k^2-({m})*({q})*k+({m})/2",
                 {"main": "2*({m})^2*({q})*k/(2*k^4-(({m})*({q})^2-1)*2*({m})*k^2+({m})^2)",
                  "second": "({m})*(2*k^2+({m}))/(2*k^2*(k^2+({m})-({m})^2*({q})^2))",
                  "cofj": "({m})/(2*k^2-2*({q})*k*(({m})-2*({j}))-2*({q})^2*({j})*(({m})-({j}))+({m}))"},
                 "(2*({k})^2-2*({q})*({k})*(({m})-2*({j}))-2*({q})^2*({j})*(({m})-({j}))+({m}))/2",
                 lambda v: {"alpha": ExactScalar(Fraction(v["m"], 2)), "beta": Fraction(v["m"], 2)}),
    _TheoremSpec("thm.hy3p7rx", "Lemma L2 (q odd) with f(k)=k+beta", LemmaVariant.L2_ODD,
                 ("alpha", "beta", "m", "q"), ("q odd",), "k+({beta})",
                 {"main": _LIN_SUM, "cofj": _LIN_COF}, _LIN_DEN),
    _TheoremSpec("cor.hy3p7rx", "Lemma L2 (q odd) with f(k)=k-m/2 and alpha=m/2", LemmaVariant.L2_ODD,
                 ("m", "q"), ("q odd",), "k-({m})/2",
                 {"main": "({m})*(2*k+({m})*(({q})-1))/(2*k^2+2*({m})*k*(({q})-1)-({m})^2*({q}))",
                  "cofj": "({m})/(2*k+2*({j})*({q})-({m}))"},
                 "(2*({k})+2*({j})*({q})-({m}))/2",
                 lambda v: {"alpha": ExactScalar(Fraction(v["m"], 2)), "beta": Fraction(-v["m"], 2)}),
    _TheoremSpec("thm.stcc51n", "Lemma L2 (q odd) with f(k)=k^2-mqk+beta", LemmaVariant.L2_ODD,
                 ("alpha", "beta", "m", "q"), ("q odd",), "k^2-({m})*({q})*k+({beta})",
                 {"main": "2*({alpha})*(k^2+({beta}))/(k^4-(({m})^2*({q})^2-2*({beta}))*k^2+({beta})^2-({alpha})^2)",
                  "cofj": _QUAD_COF}, _QUAD_DEN),
]

for _spec in _THEOREMS:
    _register(Family(_spec.name, _spec.title, _spec.variant, _spec.params, _spec.constraints,
                     _theorem_builder(_spec)))


def _build_lemma(params: Mapping[str, Any], **_: Any) -> IdentityRecord:
    allowed = {"variant", "f", "alpha", "m", "q", "zero_side"}
    unknown = set(params) - allowed
    if unknown:
        raise ConstraintViolation(f"unknown parameter(s) {sorted(unknown)} for lemma")
    try:
        variant = LemmaVariant(str(params.get("variant", "L1")))
    except ValueError as exc:
        raise ConstraintViolation("variant must be one of L1, L2_EVEN, L2_ODD, LP, LPALT") from exc
    try:
        f = parse_sequence(str(params["f"]))
    except KeyError:
        raise ConstraintViolation("f is required") from None
    except (ExprSyntaxError, ValueError) as exc:
        raise ConstraintViolation("f must be a polynomial with positive leading coefficient", str(exc)) from exc
    alpha = _scalar(params, "alpha")
    m = _posint({"m": params.get("m", 1)}, "m")
    q = _posint({"q": params.get("q", 1)}, "q")
    zs = params.get("zero_side")
    try:
        cfg = LemmaConfig(variant, f, alpha, m, q, None if zs is None else int(zs))
    except InvalidConfig as exc:
        raise ConstraintViolation(str(exc)) from exc
    rhs = rhs_exact(cfg)
    shown = {"variant": variant.value, "f": str(f), "alpha": str(alpha), "m": m, "q": q}
    return IdentityRecord(id=_record_id("lemma", shown), family="lemma", cfg=cfg, printed_args=(),
                          rhs=rhs, rhs_text=str(rhs), notes=("boundary sum of the lemma",), group="family")


_register(Family("lemma", "Any lemma instantiation; the right side is the boundary sum", None,
                 ("variant", "f", "alpha", "m", "q", "zero_side"), (), _build_lemma))


# ---------------------------------------------------------------------------
# angle expansions

# sin and cos of a*pi/12 in the first quadrant, where they are single surds
_SIN_Q1 = {0: ExactScalar(0), 2: ExactScalar(Fraction(1, 2)), 3: ExactScalar(Fraction(1, 2), 2),
           4: ExactScalar(Fraction(1, 2), 3), 6: ExactScalar(1)}


def _sin_twelfths(a: int) -> Optional[ExactScalar]:
    a %= 24
    sign = 1
    if a >= 12:
        a, sign = a - 12, -1
    if a > 6:
        a = 12 - a
    v = _SIN_Q1.get(a)
    return None if v is None else v * sign


def exact_trig(theta: ClosedFormExpr) -> Optional[tuple[ExactScalar, ExactScalar]]:
    """(sin, cos) of a rational multiple of pi when both are single surds."""
    if theta.is_zero():
        return ExactScalar(0), ExactScalar(1)
    if len(theta.terms) != 1:
        return None
    (p, atoms), c = theta.terms[0]
    if p != 1 or atoms:
        return None
    a = c * 12
    if a.denominator != 1:
        return None
    s, co = _sin_twelfths(int(a)), _sin_twelfths(int(a) + 6)
    if s is None or co is None:
        return None
    return s, co


def _theta(params: Mapping[str, Any]) -> ClosedFormExpr:
    if "theta" not in params:
        raise ConstraintViolation("theta is required")
    unknown = set(params) - {"theta"}
    if unknown:
        raise ConstraintViolation(f"unknown parameter(s) {sorted(unknown)}")
    try:
        return parse_closed_form(str(params["theta"]))
    except (ExprSyntaxError, ValueError) as exc:
        raise ConstraintViolation("theta must be a closed form", str(exc)) from exc


def _check_range(theta: ClosedFormExpr, ctx: PrecisionContext) -> BoundedReal:
    value = eval_expr(theta, ctx)
    half_pi = pi_const(ctx) * Fraction(1, 2)
    try:
        inside = (half_pi - abs(value)).sign() > 0
    except Undecidable:
        inside = False
    if not inside:
        raise ConstraintViolation("|theta| < pi/2", f"theta={theta}")
    return value


def _theta_record(name: str, theta: ClosedFormExpr, cfg: LemmaConfig, printed, rhs: ClosedFormExpr,
                  note: str) -> IdentityRecord:
    return IdentityRecord(id=f"{name}(theta={theta})", family=name, cfg=cfg, printed_args=printed,
                          rhs=rhs, rhs_text=str(rhs), constraints=("|theta| < pi/2",), notes=(note,),
                          group="family")


def _theta_ctx(digits: int) -> PrecisionContext:
    return PrecisionContext.for_terms(digits, 1000)


def _build_linear(params: Mapping[str, Any], digits: int = 30, **_: Any) -> IdentityRecord:
    theta = _theta(params)
    ctx = _theta_ctx(digits)
    value = _check_range(theta, ctx)
    trig = exact_trig(theta)
    if trig is not None:
        tan = trig[0] / trig[1]
        printed = _printed({"main": "({a})/(k^2+k+({a})^2)"}, {"a": str(tan)}, 1)
        alpha = tan
    else:
        alpha, printed = tan_bounded(value, ctx), ()
    cfg = LemmaConfig(LemmaVariant.L1, parse_sequence("k"), alpha, 1, 1)
    return _theta_record("theta-linear", theta, cfg, printed, theta,
                         "theta = sum atan(tan(theta)/(k^2+k+tan(theta)^2))")


def _build_quartic(params: Mapping[str, Any], digits: int = 30, **_: Any) -> IdentityRecord:
    theta = _theta(params)
    ctx = _theta_ctx(digits)
    value = _check_range(theta, ctx)
    trig = exact_trig(theta)
    if trig is not None:
        tan = trig[0] / trig[1]
        printed = _printed({"main": "4*k*({t})/(4*k^4+1+({t})^2)"}, {"t": str(tan)}, 1)
        alpha = tan * Fraction(1, 2)
    else:
        alpha, printed = tan_bounded(value, ctx) * Fraction(1, 2), ()
    cfg = LemmaConfig(LemmaVariant.L1, parse_sequence("k^2-k+1/2"), alpha, 1, 1)
    return _theta_record("theta-quartic", theta, cfg, printed, theta,
                         "theta = sum atan(4k tan(theta)/(4k^4+sec(theta)^2))")


def _build_expansion(params: Mapping[str, Any], **_: Any) -> IdentityRecord:
    theta = _theta(params)
    _check_range(theta, _theta_ctx(30))
    trig = exact_trig(theta * 2)
    if trig is None or trig[1].n != 1:
        raise ConstraintViolation("cos(2*theta) rational", f"theta={theta}")
    s, c = trig
    printed = _printed({"main": "({s})/(k^2+(2*({c})+1)*k+({c})+1)"}, {"s": str(s), "c": str(c)}, 1)
    cfg = LemmaConfig(LemmaVariant.L1, parse_sequence(f"k+({c})"), s, 1, 1)
    return _theta_record("theta-expansion", theta, cfg, printed, theta,
                         "theta = sum atan(sin(2theta)/(k^2+(2cos(2theta)+1)k+cos(2theta)+1))")


def _build_square(params: Mapping[str, Any], **_: Any) -> IdentityRecord:
    theta = _theta(params)
    _check_range(theta, _theta_ctx(30))
    trig = exact_trig(theta)
    if trig is None or trig[1].n != 1:
        raise ConstraintViolation("cos(theta) rational", f"theta={theta}")
    s, c = trig
    printed = _printed({"main": "4*k*({s})/(k^4-2*(1-({c}))*k^2+2+2*({c}))", "cofj": "({s})/(k^2+({c}))"},
                       {"s": str(s), "c": str(c)}, 2)
    cfg = LemmaConfig(LemmaVariant.L1, parse_sequence(f"k^2-2*k+1+({c})"), s, 2, 1)
    return _theta_record("theta-square", theta, cfg, printed, theta * theta / 2,
                         "theta^2/2 = sum atan(4k sin(theta)/(k^4-4k^2 sin^2(theta/2)+4cos^2(theta/2)))"
                         " * atan(sin(theta)/(k^2+cos(theta)))")


for _name, _title, _build in [
    ("theta-linear", "angle expansion with alpha=tan(theta), f(k)=k", _build_linear),
    ("theta-quartic", "angle expansion with alpha=tan(theta)/2, f(k)=k^2-k+1/2", _build_quartic),
    ("theta-expansion", "half-angle expansion with alpha=sin(2theta), f(k)=k+cos(2theta)", _build_expansion),
    ("theta-square", "squared-angle expansion with alpha=sin(theta), f(k)=k^2-2k+1+cos(theta), m=2",
     _build_square),
]:
    _register(Family(_name, _title, LemmaVariant.L1, ("theta",), ("|theta| < pi/2",), _build))


def family_instantiate(family: str, params: Mapping[str, Any], *, digits: int = 30) -> IdentityRecord:
    """Bind a family's parameters; raises ConstraintViolation naming the constraint.

    ``digits`` only matters for angle expansions at non-special angles, where
    alpha is a certified numeric value rather than an exact scalar.
    """
    try:
        fam = FAMILIES[family]
    except KeyError:
        raise UnknownFamily(f"unknown family {family!r}") from None
    return fam.build(params, digits=digits)


# ---------------------------------------------------------------------------
# label bindings: parameterized displays tied to a family


@dataclass(frozen=True)
class Binding:
    """A printed parameterized identity, expressed as a family with some parameters fixed.

    ``fixed`` values are templates over the free parameters; the printed
    arguments and right side are templates over the free parameters too
    (``SUM``/``PROD`` loops allowed in the right side).
    """

    id: str
    family: str
    fixed: tuple[tuple[str, str], ...]
    free: tuple[str, ...]
    printed: tuple[tuple[str, str], ...]
    rhs: str
    constraints: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    samples: tuple[tuple[tuple[str, str], ...], ...] = ()
    sign: int = 1
    printed_typos: tuple[tuple[str, str], ...] = ()

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Binding":
        return cls(
            id=d["id"], family=d["family"], fixed=tuple(d["fixed"].items()), free=tuple(d["free"]),
            printed=tuple((p["slot"], p["expr"]) for p in d["printed_args"]), rhs=d["rhs"],
            constraints=tuple(d["constraints"]), notes=tuple(d["notes"]),
            samples=tuple(tuple(s.items()) for s in d.get("samples", ())), sign=d.get("sign", 1),
            printed_typos=tuple((p["slot"], p["expr"]) for p in d.get("printed_typos", ())))

    def instantiate(self, values: Mapping[str, Any]) -> IdentityRecord:
        missing = set(self.free) - set(values)
        if missing:
            raise ConstraintViolation(f"missing free parameter(s) {sorted(missing)} for {self.id}")
        env = {k: str(values[k]) for k in self.free}
        params = dict(env)
        for name, template in self.fixed:
            params[name] = fill(template, env)
        base = family_instantiate(self.family, params)
        try:
            printed = _printed(dict(self.printed), env, base.cfg.m)
            rhs_text = expand_loops(fill(self.rhs, env))
            rhs = parse_closed_form(rhs_text)
        except (ExprSyntaxError, ValueError, ZeroDivisionError) as exc:
            raise ConstraintViolation(f"binding {self.id} undefined at {env}", str(exc)) from exc
        return IdentityRecord(
            id=_record_id(self.id, env), family=self.family, cfg=base.cfg, printed_args=printed,
            rhs=rhs, rhs_text=rhs_text, constraints=self.constraints, notes=self.notes,
            group="binding", sign=self.sign,
            printed_typos=_printed(dict(self.printed_typos), env, base.cfg.m))


def load_bindings(source=None) -> list[Binding]:
    from .records import read_document, validate_document

    doc = read_document(source)
    validate_document(doc)
    return [Binding.from_dict(d) for d in doc.get("bindings", ())]
