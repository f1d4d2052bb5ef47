"""Identity records and the catalog loader.

The catalog is a JSON document (see ``data/catalog.schema.json``); all numbers
are exact strings in the expression grammar. The bundled file is the single
source of truth; ``ATANSUM_CATALOG`` points the loader at another file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Union

import jsonschema

from ..algebra import check_printed_form, slots
from ..closedform import ClosedFormExpr
from ..parser import ExprSyntaxError, parse_closed_form, parse_rational_function, parse_scalar, parse_sequence
from ..rational import RationalFunction
from ..telescope import InvalidConfig, LemmaConfig, LemmaVariant, default_zero_side

CATALOG_ENV = "ATANSUM_CATALOG"


class CatalogError(ValueError):
    """Base class for catalog loading problems."""


class SchemaError(CatalogError):
    """The document does not conform to the catalog schema."""

    def __init__(self, message: str, record_id: Optional[str] = None, field: Optional[str] = None):
        super().__init__(message)
        self.record_id = record_id
        self.field = field


class ParseError(CatalogError):
    """A record field could not be parsed or violates a record invariant."""

    def __init__(self, message: str, record_id: str, field: Optional[str] = None):
        super().__init__(f"record {record_id!r}, field {field!r}: {message}" if field
                         else f"record {record_id!r}: {message}")
        self.record_id = record_id
        self.field = field


@dataclass(frozen=True)
class PrintedArg:
    slot: str
    text: str
    value: RationalFunction


@dataclass(frozen=True)
class FamilyRef:
    family: str
    params: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.params)


@dataclass(frozen=True)
class IdentityRecord:
    """One identity: a lemma configuration, its printed arguments and right side.

    The printed left side is ``sign * sum_{k >= start} term_k``.
    """

    id: str
    family: str
    cfg: LemmaConfig
    printed_args: tuple[PrintedArg, ...]
    rhs: ClosedFormExpr
    rhs_text: str
    constraints: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    group: str = ""
    sign: int = 1
    start: int = 1
    alt_configs: tuple[FamilyRef, ...] = ()
    printed_typos: tuple[PrintedArg, ...] = field(default=(), compare=False)

    def printed_ok(self) -> bool:
        return all(check_printed_form(self.cfg, p.slot, p.value) for p in self.printed_args)

    def to_dict(self) -> dict[str, Any]:
        """The catalog-file form of this record."""
        cfg = self.cfg
        out: dict[str, Any] = {
            "id": self.id, "family": self.family, "variant": cfg.variant.value,
            "f": str(cfg.f), "alpha": str(cfg.alpha), "m": cfg.m, "q": cfg.q,
            "printed_args": [{"slot": p.slot, "expr": p.text} for p in self.printed_args],
            "rhs": self.rhs_text, "constraints": list(self.constraints), "notes": list(self.notes),
        }
        if self.group:
            out["group"] = self.group
        if cfg.zero_side != default_zero_side(cfg.variant):
            out["zero_side"] = cfg.zero_side
        if self.sign != 1:
            out["sign"] = self.sign
        if self.start != 1:
            out["start"] = self.start
        if self.alt_configs:
            out["alt_configs"] = [{"family": a.family, "params": a.as_dict()} for a in self.alt_configs]
        if self.printed_typos:
            out["printed_typos"] = [{"slot": p.slot, "expr": p.text} for p in self.printed_typos]
        return out


@lru_cache(maxsize=1)
def catalog_schema() -> dict:
    text = resources.files("atansum.catalog").joinpath("data/catalog.schema.json").read_text("utf-8")
    return json.loads(text)


def bundled_catalog_path() -> Path:
    return Path(str(resources.files("atansum.catalog").joinpath("data/catalog.json")))


def default_catalog_path() -> Path:
    env = os.environ.get(CATALOG_ENV)
    return Path(env) if env else bundled_catalog_path()


Source = Union[str, os.PathLike, Mapping[str, Any], None]


def read_document(source: Source = None) -> dict:
    """Load the raw catalog document from a path, JSON text or mapping."""
    if source is None:
        source = default_catalog_path()
    if isinstance(source, Mapping):
        return dict(source)
    if isinstance(source, str) and source.lstrip().startswith("{"):
        text = source
    else:
        try:
            text = Path(source).read_text("utf-8")
        except OSError as exc:
            raise CatalogError(f"cannot read catalog {source}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"catalog is not valid JSON: {exc}") from exc


def validate_document(doc: Mapping[str, Any]) -> None:
    """Raise SchemaError naming the offending record and field."""
    validator = jsonschema.Draft202012Validator(catalog_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if not errors:
        return
    err = errors[0]
    path = list(err.absolute_path)
    record_id = None
    fld = None
    if len(path) >= 2 and path[0] in ("records", "bindings"):
        item = doc[path[0]][path[1]]
        if isinstance(item, Mapping):
            record_id = item.get("id")
        fld = ".".join(str(p) for p in path[2:]) or None
        if fld is None and err.validator == "required":
            fld = err.message.split("'")[1]
    where = f"record {record_id!r}" if record_id else "/".join(str(p) for p in path) or "document"
    raise SchemaError(f"{where}, field {fld!r}: {err.message}" if fld else f"{where}: {err.message}",
                      record_id, fld)


def _parse_field(rid: str, name: str, parser, text: str):
    try:
        return parser(text)
    except (ExprSyntaxError, ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(f"{text!r}: {exc}", rid, name) from exc


def _printed(rid: str, name: str, items: Iterable[Mapping[str, str]]) -> tuple[PrintedArg, ...]:
    out = []
    for i, item in enumerate(items):
        value = _parse_field(rid, f"{name}[{i}]", parse_rational_function, item["expr"])
        out.append(PrintedArg(item["slot"], item["expr"], value))
    return tuple(out)


def record_from_dict(d: Mapping[str, Any], *, check: bool = True) -> IdentityRecord:
    """Build one record; with ``check`` the record invariants are enforced."""
    rid = d["id"]
    f = _parse_field(rid, "f", parse_sequence, d["f"])
    alpha = _parse_field(rid, "alpha", parse_scalar, d["alpha"])
    try:
        cfg = LemmaConfig(LemmaVariant(d["variant"]), f, alpha, d["m"], d["q"], d.get("zero_side"))
    except InvalidConfig as exc:
        raise ParseError(str(exc), rid, "variant") from exc
    rhs = _parse_field(rid, "rhs", parse_closed_form, d["rhs"])
    rec = IdentityRecord(
        id=rid, family=d["family"], cfg=cfg,
        printed_args=_printed(rid, "printed_args", d["printed_args"]),
        rhs=rhs, rhs_text=d["rhs"],
        constraints=tuple(d["constraints"]), notes=tuple(d["notes"]),
        group=d.get("group", ""), sign=d.get("sign", 1), start=d.get("start", 1),
        alt_configs=tuple(FamilyRef(a["family"], tuple(sorted(a["params"].items())))
                          for a in d.get("alt_configs", ())),
        printed_typos=_printed(rid, "printed_typos", d.get("printed_typos", ())),
    )
    if check:
        check_record(rec)
    return rec


def check_record(rec: IdentityRecord) -> None:
    """Record invariants: known slots, non-empty rhs, printed forms that match."""
    known = set(slots(rec.cfg))
    for i, p in enumerate(rec.printed_args):
        if p.slot not in known:
            raise ParseError(f"slot {p.slot!r} does not exist for {rec.cfg.describe()}",
                             rec.id, f"printed_args[{i}]")
        if not check_printed_form(rec.cfg, p.slot, p.value):
            raise ParseError(f"printed form {p.text!r} does not match the {p.slot} argument",
                             rec.id, f"printed_args[{i}]")
    if not rec.rhs_text.strip():
        raise ParseError("empty right-hand side", rec.id, "rhs")


def load_catalog(source: Source = None, *, check: bool = True) -> list[IdentityRecord]:
    """Parse and validate every record of a catalog document.

    ``check=False`` skips the printed-form invariant so that deliberately
    broken catalogs can still be loaded and reported on by the verifier.
    """
    doc = read_document(source)
    validate_document(doc)
    seen: set[str] = set()
    records = []
    for d in doc["records"]:
        if d["id"] in seen:
            raise SchemaError(f"duplicate record id {d['id']!r}", d["id"], "id")
        seen.add(d["id"])
        records.append(record_from_dict(d, check=check))
    return records


def find_record(records: Iterable[IdentityRecord], rid: str) -> IdentityRecord:
    for rec in records:
        if rec.id == rid:
            return rec
    raise KeyError(f"unknown id {rid!r}")
