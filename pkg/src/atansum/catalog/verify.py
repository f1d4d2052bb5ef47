"""Verification drivers: one certified report per identity.

Each report combines four independent checks:

* the series, summed directly to N terms plus its exact remainder, against the
  printed closed form (``match``);
* the exact telescoping residual term(k) - (S(k) - S(k+s)) for every scanned
  k, which must contain zero (``residual_ok``);
* the printed arctangent arguments against the ones derived from the lemma
  (``printed_ok``);
* every alternative family instantiation of the same identity (``alt_ok``).

Identities stated only for positive alpha are also evaluated at -alpha; the
printed formula must fail there, otherwise the positivity check is vacuous.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from ..algebra import check_printed_form
from ..closedform import eval_expr, expr_equal, simplify
from ..numerics import BoundedReal, PrecisionContext
from ..sequences import NeverMonotone, hypothesis_report
from ..telescope import DEFAULT_MAX_TERMS, Engine, evaluate, rhs_exact
from .families import Binding, ConstraintViolation, family_instantiate, load_bindings
from .records import IdentityRecord, load_catalog

RESIDUAL_SCAN = 500


@dataclass
class AltCheck:
    family: str
    params: dict[str, str]
    match: bool
    value: str = ""
    error: str = ""

    def to_dict(self) -> dict[str, Any]:
        out = {"family": self.family, "params": self.params, "match": self.match, "value": self.value}
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class VerificationReport:
    """Outcome of verifying one identity; failures are data, not exceptions."""

    id: str
    digits: int
    lhs: Optional[BoundedReal] = None
    rhs: Optional[BoundedReal] = None
    match: bool = False
    n_terms: int = 0
    branch_violations: list[int] = field(default_factory=list)
    denominator_zeros: list[int] = field(default_factory=list)
    residual_max: float = 0.0
    residual_ok: bool = False
    residual_scanned: int = 0
    hypothesis_k0: Optional[int] = None
    hypothesis_violations: list[str] = field(default_factory=list)
    printed_ok: bool = False
    printed_failures: list[str] = field(default_factory=list)
    boundary_match: Optional[bool] = None
    structural_match: Optional[bool] = None
    probe_alpha: Optional[str] = None
    probe_failed: Optional[bool] = None
    alt_checks: list[AltCheck] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def alt_ok(self) -> bool:
        return all(a.match for a in self.alt_checks)

    @property
    def passed(self) -> bool:
        return (self.match and self.residual_ok and self.printed_ok and self.alt_ok
                and self.probe_failed is not False and not self.errors)

    @property
    def difference(self) -> Optional[float]:
        if self.lhs is None or self.rhs is None:
            return None
        return float(abs(self.lhs.value - self.rhs.value))

    def to_dict(self, *, timing: bool = False) -> dict[str, Any]:
        """JSON-ready form. Wall time is left out unless asked for, so that
        reports are byte-identical across runs."""

        def num(v: Optional[BoundedReal]):
            if v is None:
                return None
            return {"value": v.nstr(self.digits + 2), "err": v.mp.nstr(v.err, 3)}

        out = {
            "id": self.id, "passed": self.passed, "match": self.match, "digits": self.digits,
            "lhs": num(self.lhs), "rhs": num(self.rhs), "n_terms": self.n_terms,
            "branch_violations": self.branch_violations, "denominator_zeros": self.denominator_zeros,
            "residual_max": f"{self.residual_max:.3e}", "residual_ok": self.residual_ok,
            "residual_scanned": self.residual_scanned,
            "hypothesis_k0": self.hypothesis_k0, "hypothesis_violations": self.hypothesis_violations,
            "printed_ok": self.printed_ok, "printed_failures": self.printed_failures,
            "boundary_match": self.boundary_match, "structural_match": self.structural_match,
            "probe": None if self.probe_alpha is None else {"alpha": self.probe_alpha, "failed": self.probe_failed},
            "alt_configs": [a.to_dict() for a in self.alt_checks],
            "errors": self.errors,
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


def _close(a: BoundedReal, b: BoundedReal) -> bool:
    return bool(abs(a.value - b.value) <= a.err + b.err)


def _context(digits: int, scan: int) -> PrecisionContext:
    return PrecisionContext.for_terms(digits, max(DEFAULT_MAX_TERMS, scan))


def verify_identity(rec: IdentityRecord, digits: int = 30, ctx: Optional[PrecisionContext] = None, *,
                    residual_scan: int = RESIDUAL_SCAN, probe: bool = True,
                    max_terms: int = DEFAULT_MAX_TERMS) -> VerificationReport:
    """Run every check on one record; exceptions are recorded in ``errors``.

    ``max_terms`` caps the directly summed prefix; the remainder after it is
    exact, so a smaller cap trades the strength of the direct route for speed
    without loosening the comparison.
    """
    t0 = time.perf_counter()
    rep = VerificationReport(rec.id, digits)
    cfg = rec.cfg
    ctx = ctx or _context(digits, residual_scan)
    scan = max(residual_scan, rec.start)
    eng = Engine(cfg, ctx)
    try:
        ev = evaluate(cfg, digits, engine=eng, keep_terms=scan, max_terms=max_terms)
        pre = eng._zero
        for t in ev.terms[:rec.start - 1]:
            pre = pre + t.term
        rep.lhs = (ev.lhs - pre) * rec.sign
        rep.rhs = eval_expr(rec.rhs, ctx)
        rep.match = _close(rep.lhs, rep.rhs)
        rep.n_terms = ev.n_terms
        rep.boundary_match = _close((ev.rhs - pre) * rec.sign, rep.rhs)
        if ev.rhs_expr is not None and rec.start == 1:
            lemma_side = simplify(ev.rhs_expr * rec.sign)
            rep.structural_match = lemma_side == simplify(rec.rhs)

        worst = 0.0
        ok = True
        for t in ev.terms[rec.start - 1:]:
            if not t.branch_ok:
                rep.branch_violations.append(t.k)
            if t.denominator_zero:
                rep.denominator_zeros.append(t.k)
            r = eng.residual(t.k, t)
            worst = max(worst, float(abs(r.value)))
            if abs(r.value) > r.err:
                ok = False
        rep.residual_max, rep.residual_ok = worst, ok
        rep.residual_scanned = len(ev.terms) - (rec.start - 1)
    except Exception as exc:  # failures are data
        rep.errors.append(f"evaluate: {type(exc).__name__}: {exc}")

    try:
        hyp = hypothesis_report(cfg.f, max(2, residual_scan))
        rep.hypothesis_k0 = hyp.k0
        rep.hypothesis_violations = [str(v) for v in hyp.violations]
    except NeverMonotone as exc:
        rep.hypothesis_violations = [str(exc)]

    for p in rec.printed_args:
        try:
            good = check_printed_form(cfg, p.slot, p.value)
        except (KeyError, ValueError) as exc:
            good = False
            rep.errors.append(f"printed {p.slot}: {exc}")
        if not good:
            rep.printed_failures.append(p.slot)
    rep.printed_ok = not rep.printed_failures

    if probe and "alpha > 0" in rec.constraints and cfg.exact_alpha and cfg.alpha.sign() > 0:
        rep.probe_alpha = str(-cfg.alpha)
        rep.probe_failed = _probe_fails(rec, digits, ctx, max_terms)

    for ref in rec.alt_configs:
        rep.alt_checks.append(_alt_check(rec, ref.family, ref.as_dict(), rep.rhs, digits, ctx, max_terms))

    rep.wall_time = time.perf_counter() - t0
    return rep


def _probe_fails(rec: IdentityRecord, digits: int, ctx: PrecisionContext, max_terms: int) -> bool:
    """Does the printed formula break at -alpha?

    The closed form is re-derived from the lemma with every atan(alpha/0)
    read literally as +pi/2, which is how the printed right side treats it;
    the series itself is odd in alpha.
    """
    neg = rec.cfg.with_alpha(-rec.cfg.alpha)
    ev = evaluate(neg, min(digits, 20), max_terms=max_terms)
    formula = eval_expr(rhs_exact(neg, literal_half_pi=True), ctx)
    return not _close(ev.lhs, formula)


def _alt_check(rec: IdentityRecord, family: str, params: dict[str, str], rhs: Optional[BoundedReal],
               digits: int, ctx: PrecisionContext, max_terms: int) -> AltCheck:
    try:
        alt = family_instantiate(family, params, digits=digits)
        ev = evaluate(alt.cfg, digits, ctx, max_terms=max_terms)
        own = eval_expr(alt.rhs, ctx)
        value = ev.lhs * rec.sign
        good = ev.match and _close(ev.lhs, own) and alt.printed_ok()
        if rhs is not None:
            good = good and _close(value, rhs)
        return AltCheck(family, params, bool(good), value.nstr(digits))
    except (ConstraintViolation, ValueError, ArithmeticError, KeyError) as exc:
        return AltCheck(family, params, False, error=f"{type(exc).__name__}: {exc}")


def _verify_task(args) -> VerificationReport:
    rec, digits, scan = args
    return verify_identity(rec, digits, residual_scan=scan)


def verify_all(records: Optional[Sequence[IdentityRecord]] = None, digits: int = 30, *,
               jobs: int = 1, residual_scan: int = RESIDUAL_SCAN, source=None) -> list[VerificationReport]:
    """One report per record, ordered by id whatever the number of workers."""
    if records is None:
        records = load_catalog(source)
    tasks = [(r, digits, residual_scan) for r in records]
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_verify_task, tasks, chunksize=1))
    else:
        reports = [_verify_task(t) for t in tasks]
    return sorted(reports, key=lambda r: r.id)


def verify_binding(binding: Binding, digits: int = 30, *, samples: Optional[Iterable[dict]] = None,
                   residual_scan: int = 200, max_terms: int = DEFAULT_MAX_TERMS) -> list[VerificationReport]:
    """Verify a parameterized display at each of its sample parameter values."""
    out = []
    for s in (samples if samples is not None else [dict(x) for x in binding.samples]):
        try:
            rec = binding.instantiate(s)
        except ConstraintViolation as exc:
            rep = VerificationReport(f"{binding.id}({s})", digits)
            rep.errors.append(f"instantiate: {exc}")
            out.append(rep)
            continue
        out.append(verify_identity(rec, digits, residual_scan=residual_scan, max_terms=max_terms))
    return out


def verify_bindings(digits: int = 30, *, source=None, residual_scan: int = 200,
                    max_terms: int = DEFAULT_MAX_TERMS) -> list[VerificationReport]:
    reports = []
    for b in load_bindings(source):
        reports.extend(verify_binding(b, digits, residual_scan=residual_scan, max_terms=max_terms))
    return reports


@dataclass
class Summary:
    total: int
    passed: int
    failed_ids: list[str]
    max_residual: float
    max_difference: float

    @property
    def failed(self) -> int:
        return self.total - self.passed

    def to_dict(self) -> dict[str, Any]:
        return {"total": self.total, "passed": self.passed, "failed": self.failed,
                "failed_ids": self.failed_ids, "max_residual": f"{self.max_residual:.3e}",
                "max_difference": f"{self.max_difference:.3e}"}


def summarize(reports: Sequence[VerificationReport]) -> Summary:
    diffs = [r.difference for r in reports if r.difference is not None]
    return Summary(
        total=len(reports), passed=sum(r.passed for r in reports),
        failed_ids=[r.id for r in reports if not r.passed],
        max_residual=max((r.residual_max for r in reports), default=0.0),
        max_difference=max(diffs, default=0.0))
