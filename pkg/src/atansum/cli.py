"""Command-line front end.

Exit codes: 0 when everything selected matches, 1 on a mismatch, 2 on a usage
or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Callable, Optional, Sequence

from . import __version__
from .catalog.families import FAMILIES, ConstraintViolation, UnknownFamily, family_instantiate, load_bindings
from .catalog.records import CatalogError, IdentityRecord, find_record, load_catalog
from .catalog.verify import VerificationReport, summarize, verify_all, verify_binding, verify_identity
from .closedform import eval_expr, simplify
from .numerics import BoundedReal, PrecisionContext, Undecidable
from .parser import ExprSyntaxError, parse_scalar, parse_sequence
from .telescope import (
    DEFAULT_MAX_TERMS,
    Engine,
    InvalidConfig,
    LemmaConfig,
    LemmaVariant,
    evaluate,
    regime_start,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
MAX_DIGITS = 10000

CSV_COLUMNS = [
    "id", "passed", "match", "lhs", "lhs_err", "rhs", "rhs_err", "difference", "certified_digits",
    "n_terms", "digits", "residual_max", "residual_ok", "branch_violations", "printed_ok",
    "printed_failures", "probe_failed", "alt_ok", "errors",
]


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit code 2."""


def _digits(text: str) -> int:
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"digits must be an integer, got {text!r}") from None
    if not 1 <= d <= MAX_DIGITS:
        raise argparse.ArgumentTypeError(f"digits must lie in [1, {MAX_DIGITS}], got {d}")
    return d


def _points(text: str) -> list[int]:
    try:
        pts = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"points must be comma-separated integers, got {text!r}") from None
    if not pts or min(pts) < 1:
        raise argparse.ArgumentTypeError("points must be positive integers")
    return pts


def _key_values(items: Sequence[str]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"expected name=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _certified(v: BoundedReal) -> int:
    return v.certified_digits()


def _num(v: BoundedReal, digits: int) -> str:
    return f"{v.nstr(digits)} +/- {v.mp.nstr(v.err, 3)} ({_certified(v)} digits certified)"


# ---------------------------------------------------------------------------
# report rendering


def _csv_row(r: VerificationReport) -> list[Any]:
    d = r.digits + 2
    return [
        r.id, r.passed, r.match,
        r.lhs.nstr(d) if r.lhs else "", r.lhs.mp.nstr(r.lhs.err, 3) if r.lhs else "",
        r.rhs.nstr(d) if r.rhs else "", r.rhs.mp.nstr(r.rhs.err, 3) if r.rhs else "",
        f"{r.difference:.3e}" if r.difference is not None else "",
        _certified(r.lhs) if r.lhs else "", r.n_terms, r.digits, f"{r.residual_max:.3e}", r.residual_ok,
        " ".join(map(str, r.branch_violations)), r.printed_ok, " ".join(r.printed_failures),
        "" if r.probe_failed is None else r.probe_failed, r.alt_ok, " | ".join(r.errors),
    ]


def render_reports(reports: Sequence[VerificationReport], fmt: str, digits: int) -> str:
    summary = summarize(reports)
    if fmt == "json":
        doc = {"version": 1, "digits": digits, "summary": summary.to_dict(),
               "reports": [r.to_dict() for r in reports]}
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in reports:
            w.writerow(_csv_row(r))
        return buf.getvalue()
    width = max([len(r.id) for r in reports] + [2])
    show = digits
    lines = [f"{'id':<{width}}  status  {'value':<{show + 3}}  {'+/-':>8}  {'|lhs-rhs|':>9}  {'N':>5}  cert  residual"]
    for r in reports:
        value = r.lhs.nstr(show) if r.lhs else "-"
        radius = r.lhs.mp.nstr(r.lhs.err, 2) if r.lhs else "-"
        diff = f"{r.difference:.1e}" if r.difference is not None else "-"
        cert = _certified(r.lhs) if r.lhs else 0
        lines.append(f"{r.id:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {value:<{show + 3}}  {radius:>8}  {diff:>9}  "
                     f"{r.n_terms:>5}  {cert:>4}  {r.residual_max:.1e}")
        for why in _failure_reasons(r):
            lines.append(f"{'':<{width}}    - {why}")
    lines.append(f"{summary.passed}/{summary.total} passed; max |lhs-rhs| {summary.max_difference:.1e}; "
                 f"max residual {summary.max_residual:.1e}")
    return "\n".join(lines) + "\n"


def _failure_reasons(r: VerificationReport) -> list[str]:
    out = []
    if r.lhs is not None and not r.match:
        out.append(f"series {r.lhs.nstr(15)} differs from the closed form {r.rhs.nstr(15)}")
    if r.branch_violations:
        out.append(f"branch condition fails at k = {r.branch_violations[:10]}")
    if not r.residual_ok and r.lhs is not None:
        out.append("telescoping residual is not zero")
    if r.printed_failures:
        out.append(f"printed argument(s) {', '.join(r.printed_failures)} do not match the lemma")
    if r.probe_failed is False:
        out.append(f"identity still holds at alpha={r.probe_alpha}; positivity constraint is vacuous")
    out.extend(f"alternative {a.family} {a.params}: {a.error or 'mismatch'}" for a in r.alt_checks if not a.match)
    out.extend(r.errors)
    return out


def _exit_for(reports: Sequence[VerificationReport]) -> int:
    return EXIT_OK if all(r.passed for r in reports) else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# commands


def _load(args) -> list[IdentityRecord]:
    # Invariant checks become verification failures rather than load errors,
    # so a wrong printed argument is reported as a mismatch.
    return load_catalog(args.catalog, check=False)


def cmd_verify(args, out) -> int:
    if args.bindings:
        reports = []
        for b in load_bindings(args.catalog):
            reports.extend(verify_binding(b, args.digits))
    else:
        records = _load(args)
        if args.all:
            if args.ids:
                raise UsageError("give record ids or --all, not both")
            selected = records
        elif args.ids:
            selected = []
            for rid in args.ids:
                try:
                    selected.append(find_record(records, rid))
                except KeyError:
                    raise UsageError(f"unknown id {rid!r}") from None
        else:
            raise UsageError("give one or more record ids, or --all")
        reports = verify_all(selected, args.digits, jobs=args.jobs)
    out.write(render_reports(reports, args.format, args.digits))
    return _exit_for(reports)


def _config_from_args(args) -> LemmaConfig:
    try:
        f = parse_sequence(args.f)
        alpha = parse_scalar(args.alpha)
        return LemmaConfig(LemmaVariant(args.variant), f, alpha, args.m, args.q, args.zero_side)
    except (ExprSyntaxError, InvalidConfig, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_eval(args, out) -> int:
    cfg = _config_from_args(args)
    ctx = PrecisionContext.for_terms(args.digits, args.max_terms)
    eng = Engine(cfg, ctx)
    ev = evaluate(cfg, args.digits, engine=eng, max_terms=args.max_terms)
    closed = simplify(ev.rhs_expr) if ev.rhs_expr is not None else None
    violations = [k for k in range(1, min(ev.n_terms, 500) + 1) if not eng.term(k).branch_ok]
    if args.format == "json":
        doc = {
            "config": cfg.describe(), "digits": args.digits,
            "lhs": {"value": ev.lhs.nstr(args.digits + 2), "err": ev.lhs.mp.nstr(ev.lhs.err, 3),
                    "certified_digits": _certified(ev.lhs)},
            "closed_form": str(closed) if closed is not None else None,
            "rhs": {"value": ev.rhs.nstr(args.digits + 2), "err": ev.rhs.mp.nstr(ev.rhs.err, 3)},
            "n_terms": ev.n_terms, "remainder_bound": ev.remainder_bound.mp.nstr(ev.remainder_bound.upper(), 3),
            "regime_start": regime_start(cfg), "branch_violations": violations, "match": ev.match,
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(f"config       {cfg.describe()}\n")
        out.write(f"series       {_num(ev.lhs, args.digits)}\n")
        if closed is not None:
            out.write(f"closed form  {closed}\n")
        out.write(f"boundary sum {_num(ev.rhs, args.digits)}\n")
        out.write(f"terms        N={ev.n_terms}, remainder bound {ev.remainder_bound.mp.nstr(ev.remainder_bound.upper(), 3)}\n")
        if violations:
            out.write(f"branch       the two-arctangent formula fails at k = {violations[:10]}\n")
        out.write(f"match        {'yes' if ev.match else 'NO'}\n")
    return EXIT_OK if ev.match else EXIT_MISMATCH


_ANGLE_FAMILIES = {"linear": "theta-linear", "quartic": "theta-quartic"}


def cmd_expand_angle(args, out) -> int:
    try:
        rec = family_instantiate(_ANGLE_FAMILIES[args.family], {"theta": args.theta}, digits=args.digits)
    except ConstraintViolation as exc:
        raise UsageError(str(exc)) from exc
    ctx = PrecisionContext.for_terms(args.digits, DEFAULT_MAX_TERMS)
    theta = eval_expr(rec.rhs, ctx)
    eng = Engine(rec.cfg, ctx)
    ev = evaluate(rec.cfg, args.digits, engine=eng)
    match = abs(ev.lhs.value - theta.value) <= ev.lhs.err + theta.err
    cert = _certified(ev.lhs)
    template = {"linear": "atan(tan(theta)/(k^2+k+tan(theta)^2))",
                "quartic": "atan(4k tan(theta)/(4k^4+sec(theta)^2))"}[args.family]
    terms = []
    main = dict((p.slot, p.value) for p in rec.printed_args).get("main")
    for k in range(1, args.terms + 1):
        value = eng.term(k).term
        symbolic = f"atan({main(k)})" if main is not None else ""
        terms.append((k, symbolic, value))
    if args.format == "json":
        doc = {"theta": str(rec.rhs), "family": args.family, "term": template, "digits": args.digits,
               "alpha": str(rec.cfg.alpha) if rec.cfg.exact_alpha else rec.cfg.alpha.nstr(args.digits),
               "terms": [{"k": k, "symbolic": s, "value": v.nstr(min(args.digits, 20))} for k, s, v in terms],
               "value": ev.lhs.nstr(args.digits + 2), "err": ev.lhs.mp.nstr(ev.lhs.err, 3),
               "certified_digits": cert, "theta_value": theta.nstr(args.digits + 2),
               "n_terms": ev.n_terms, "match": bool(match)}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(f"theta = {rec.rhs} = sum_k {template}\n")
        if rec.cfg.alpha.sign() == 0:
            out.write("every term is zero (empty-effective series)\n")
        for k, s, v in terms:
            out.write(f"  k={k:<3} {s + '  ' if s else ''}{v.nstr(min(args.digits, 20))}\n")
        out.write(f"sum     {_num(ev.lhs, args.digits)}\n")
        out.write(f"theta   {theta.nstr(args.digits)}\n")
        out.write(f"terms   N={ev.n_terms}\n")
        out.write(f"match   {'yes' if match else 'NO'}\n")
    return EXIT_OK if match and cert >= args.digits else EXIT_MISMATCH


def convergence_table(rec: IdentityRecord, points: Sequence[int], digits: int = 30) -> list[dict[str, Any]]:
    """Measured truncation error |series - partial sum| against stride*|B(N+1)|."""
    # The printed sign and starting index do not change the truncation error
    # of the underlying lemma series, so the lemma series is measured.
    ctx = PrecisionContext.for_terms(digits, max(max(points), DEFAULT_MAX_TERMS))
    eng = Engine(rec.cfg, ctx)
    total = evaluate(rec.cfg, digits, engine=eng).lhs
    rows = []
    partial = eng._zero
    k = 0
    for n in sorted(points):
        while k < n:
            k += 1
            partial = partial + eng.term(k).term
        err = abs(total - partial)
        rows.append({"N": n, "error": err.value, "error_err": err.err, "predicted": eng.tail_bound(n).value})
    return rows


def loglog_slope(rows: Sequence[dict[str, Any]]) -> Optional[float]:
    pts = [(math.log(r["N"]), math.log(float(r["error"]))) for r in rows if float(r["error"]) > 0]
    if len(pts) < 2:
        return None
    mx = sum(x for x, _ in pts) / len(pts)
    my = sum(y for _, y in pts) / len(pts)
    sxx = sum((x - mx) ** 2 for x, _ in pts)
    return sum((x - mx) * (y - my) for x, y in pts) / sxx if sxx else None


def predicted_order(cfg: LemmaConfig) -> int:
    """B(N) decays like N^-order: each of the m atoms (squared for LP) is ~ alpha/f(N)."""
    return cfg.m * cfg.f.degree * (2 if cfg.variant.squared else 1)


def cmd_convergence(args, out) -> int:
    try:
        rec = find_record(_load(args), args.id)
    except KeyError:
        raise UsageError(f"unknown id {args.id!r}") from None
    rows = convergence_table(rec, args.points, args.digits)
    slope = loglog_slope(rows)
    order = predicted_order(rec.cfg)
    if args.format == "json":
        doc = {"id": rec.id, "digits": args.digits, "predicted_order": order,
               "fitted_slope": None if slope is None else round(slope, 6),
               "rows": [{"N": r["N"], "error": r["error"].context.nstr(r["error"], 10),
                         "predicted": r["predicted"].context.nstr(r["predicted"], 10)} for r in rows]}
        out.write(json.dumps(doc, indent=2) + "\n")
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "error", "predicted"])
        for r in rows:
            w.writerow([r["N"], r["error"].context.nstr(r["error"], 10), r["predicted"].context.nstr(r["predicted"], 10)])
        out.write(buf.getvalue())
    else:
        out.write(f"{rec.id}: {rec.cfg.describe()}\n")
        out.write(f"{'N':>8}  {'|error|':>16}  {'stride*|B(N+1)|':>16}\n")
        for r in rows:
            out.write(f"{r['N']:>8}  {r['error'].context.nstr(r['error'], 8):>16}  "
                      f"{r['predicted'].context.nstr(r['predicted'], 8):>16}\n")
        if slope is not None:
            out.write(f"log-log slope {slope:.4f} (predicted -{order})\n")
    return EXIT_OK


def _record_summary(rec: IdentityRecord) -> list[str]:
    lines = [f"id       {rec.id}", f"config   {rec.cfg.describe()}"]
    for p in rec.printed_args:
        lines.append(f"{p.slot:<8} atan({p.value})")
    lines.append(f"rhs      {rec.rhs_text}")
    if rec.constraints:
        lines.append(f"requires {', '.join(rec.constraints)}")
    return lines


def _emit_single(rec: IdentityRecord, args, out) -> int:
    rep = verify_identity(rec, args.digits)
    if args.format == "text":
        out.write("\n".join(_record_summary(rec)) + "\n")
    out.write(render_reports([rep], args.format, args.digits))
    return _exit_for([rep])


def cmd_family(args, out) -> int:
    if args.name is None:
        for name, fam in sorted(FAMILIES.items()):
            out.write(f"{name:<16} {', '.join(fam.params):<36} {fam.title}\n")
        return EXIT_OK
    try:
        rec = family_instantiate(args.name, _key_values(args.params), digits=args.digits)
    except UnknownFamily as exc:
        raise UsageError(exc.args[0]) from exc
    except ConstraintViolation as exc:
        raise UsageError(str(exc)) from exc
    return _emit_single(rec, args, out)


def cmd_binding(args, out) -> int:
    bindings = {b.id: b for b in load_bindings(args.catalog)}
    if args.id is None:
        for bid, b in bindings.items():
            out.write(f"{bid:<34} {b.family:<14} free: {', '.join(b.free)}\n")
        return EXIT_OK
    if args.id not in bindings:
        raise UsageError(f"unknown id {args.id!r}")
    b = bindings[args.id]
    values = _key_values(args.params)
    if not values:
        reports = verify_binding(b, args.digits)
        out.write(render_reports(reports, args.format, args.digits))
        return _exit_for(reports)
    try:
        rec = b.instantiate(values)
    except ConstraintViolation as exc:
        raise UsageError(str(exc)) from exc
    return _emit_single(rec, args, out)


def cmd_list(args, out) -> int:
    records = _load(args)
    if args.format == "json":
        out.write(json.dumps([r.to_dict() for r in records], indent=2) + "\n")
        return EXIT_OK
    width = max(len(r.id) for r in records)
    for r in records:
        out.write(f"{r.id:<{width}}  {r.cfg.describe():<52}  {r.rhs_text}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="atansum", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=_digits, default=30, help="decimal digits to certify (default 30)")
    common.add_argument("--catalog", default=None,
                        help="catalog JSON file (default: $ATANSUM_CATALOG or the bundled catalog)")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="verify catalog identities")
    v.add_argument("ids", nargs="*", help="record ids")
    v.add_argument("--all", action="store_true", help="verify every record")
    v.add_argument("--bindings", action="store_true", help="verify every parameterized display at its samples")
    v.add_argument("--format", choices=["text", "json", "csv"], default="text")
    v.add_argument("--jobs", type=int, default=1, help="worker processes (0: one per CPU)")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", parents=[common], help="evaluate an ad-hoc lemma instantiation")
    e.add_argument("--f", required=True, help="sequence f(k), a polynomial in k or a power of one")
    e.add_argument("--alpha", required=True, help="exact scalar, e.g. 1/2 or sqrt(3)/3")
    e.add_argument("--m", type=int, default=1)
    e.add_argument("--q", type=int, default=1)
    e.add_argument("--variant", choices=[v.value for v in LemmaVariant], default="L1")
    e.add_argument("--zero-side", type=int, choices=[1, -1], default=None,
                   help="reading of atan(alpha/0); defaults by variant")
    e.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS)
    e.add_argument("--format", choices=["text", "json"], default="text")
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("expand-angle", parents=[common], help="expand an angle as an arctangent series")
    a.add_argument("--theta", required=True, help="angle in radians, e.g. pi/6 or 0.7")
    a.add_argument("--family", choices=sorted(_ANGLE_FAMILIES), default="linear")
    a.add_argument("--terms", type=int, default=5, help="number of leading terms to list")
    a.add_argument("--format", choices=["text", "json"], default="text")
    a.set_defaults(func=cmd_expand_angle)

    c = sub.add_parser("convergence", parents=[common], help="truncation error against the tail bound")
    c.add_argument("id")
    c.add_argument("--points", type=_points, default=[10, 100, 1000])
    c.add_argument("--format", choices=["text", "json", "csv"], default="text")
    c.set_defaults(func=cmd_convergence)

    f = sub.add_parser("family", parents=[common], help="instantiate and verify a parameterized family")
    f.add_argument("name", nargs="?", help="family name; omit to list families")
    f.add_argument("params", nargs="*", help="name=value bindings")
    f.add_argument("--format", choices=["text", "json", "csv"], default="text")
    f.set_defaults(func=cmd_family)

    b = sub.add_parser("binding", parents=[common], help="instantiate a parameterized display")
    b.add_argument("id", nargs="?", help="display id; omit to list them")
    b.add_argument("params", nargs="*", help="name=value for the free parameters; omit to run the samples")
    b.add_argument("--format", choices=["text", "json", "csv"], default="text")
    b.set_defaults(func=cmd_binding)

    lst = sub.add_parser("list", parents=[common], help="list catalog records")
    lst.add_argument("--format", choices=["text", "json"], default="text")
    lst.set_defaults(func=cmd_list)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    handler: Callable[..., int] = args.func
    try:
        return handler(args, out)
    except (UsageError, CatalogError) as exc:
        err.write(f"atansum: error: {exc}\n")
        return EXIT_USAGE
    except (Undecidable, ExprSyntaxError, InvalidConfig) as exc:
        err.write(f"atansum: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
