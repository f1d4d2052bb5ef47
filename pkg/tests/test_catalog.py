import copy
import json

import pytest

from atansum.catalog import SchemaError, find_record, load_catalog
from atansum.catalog.records import CATALOG_ENV, ParseError, bundled_catalog_path, default_catalog_path, read_document
from atansum.closedform import simplify
from atansum.parser import parse_closed_form
from atansum.telescope import LemmaVariant


@pytest.fixture
def document():
    return copy.deepcopy(read_document(bundled_catalog_path()))


def test_bundled_catalog_size(records):
    assert len(records) >= 45
    assert len({r.id for r in records}) == len(records)
    assert {r.group for r in records} == {"introduction", "sums", "products", "more", "alternating"}
    assert {r.cfg.variant for r in records} == set(LemmaVariant)


def test_reference_record(by_id):
    rec = by_id["equ.nekey4x"]
    assert rec.cfg.variant is LemmaVariant.L1
    assert str(rec.cfg.f) == "k" and rec.cfg.alpha == 1 and (rec.cfg.m, rec.cfg.q) == (1, 3)
    assert simplify(rec.rhs) == simplify(parse_closed_form("pi/2"))


@pytest.mark.parametrize("rid, rhs", [
    ("equ.mvf2qbz", "pi^2/8"),
    ("equ.u0196cc", "pi^3/64"),
    ("sec3.2.4-pi4-256", "pi^4/256"),
    ("sec3.3-pi6-4096", "pi^6/4096"),
    ("equ.q0xt5i4", "5*pi/4"),
    ("equ.q1fro1u", "pi^2/6"),
    ("equ.hn7l2vs", "pi^2/12"),
])
def test_headline_right_sides(by_id, rid, rhs):
    assert simplify(by_id[rid].rhs) == simplify(parse_closed_form(rhs))


def test_every_record_satisfies_its_invariants(records):
    for rec in records:
        assert rec.printed_ok(), rec.id
        assert rec.rhs_text.strip(), rec.id  # non-empty; a cancelling boundary may give 0


def test_printed_argument_count(records):
    assert sum(len(r.printed_args) for r in records) >= 40


def test_unknown_id(records):
    with pytest.raises(KeyError, match="unknown id"):
        find_record(records, "no.such.id")


def test_missing_field_names_the_field(document):
    del document["records"][2]["rhs"]
    with pytest.raises(SchemaError) as info:
        load_catalog(document)
    assert info.value.record_id == "equ.mvf2qbz" and info.value.field == "rhs"


def test_bad_expression_is_a_parse_error(document):
    document["records"][2]["rhs"] = "pi^^2"
    with pytest.raises(ParseError, match="equ.mvf2qbz"):
        load_catalog(document)


def test_wrong_printed_form_is_rejected_unless_checks_are_off(document):
    document["records"][2]["printed_args"][0]["expr"] = "1/(k^2+1)"
    with pytest.raises(ParseError, match="does not match"):
        load_catalog(document)
    recs = load_catalog(document, check=False)
    assert not find_record(recs, "equ.mvf2qbz").printed_ok()


def test_parity_violation(document):
    document["records"][0].update(variant="L2_ODD", q=2)
    with pytest.raises(ParseError, match="q odd"):
        load_catalog(document)


def test_duplicate_ids(document):
    document["records"].append(document["records"][0])
    with pytest.raises(SchemaError, match="duplicate"):
        load_catalog(document)


def test_catalog_path_from_environment(tmp_path, monkeypatch, document):
    document["records"] = document["records"][:3]
    path = tmp_path / "small.json"
    path.write_text(json.dumps(document))
    monkeypatch.setenv(CATALOG_ENV, str(path))
    assert default_catalog_path() == path
    assert len(load_catalog()) == 3


def test_round_trip(records):
    doc = {"version": 1, "records": [r.to_dict() for r in records]}
    again = load_catalog(json.loads(json.dumps(doc)))
    assert [r.to_dict() for r in again] == doc["records"]
