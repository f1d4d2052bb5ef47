import copy
import dataclasses
import json

import pytest

from atansum.catalog import load_catalog, summarize, verify_all, verify_identity
from atansum.catalog.records import bundled_catalog_path, read_document
from atansum.parser import parse_closed_form


@pytest.mark.parametrize("rid", ["equ.mvf2qbz", "sec3.2.4-pi4-256", "sec3.3-pi6-4096"])
def test_headline_records(by_id, rid):
    rep = verify_identity(by_id[rid], 30)
    assert rep.passed
    assert rep.match and abs(rep.lhs.value - rep.rhs.value) <= rep.lhs.err + rep.rhs.err
    assert rep.residual_ok and rep.residual_scanned >= 500
    assert rep.boundary_match and rep.structural_match is not False


def test_wrong_rhs_is_a_mismatch_not_an_exception(by_id):
    rec = dataclasses.replace(by_id["equ.mvf2qbz"], rhs=parse_closed_form("pi^2/9"))
    rep = verify_identity(rec, 30)
    assert not rep.match and not rep.passed
    assert rep.errors == []


def test_positivity_probe(by_id):
    constrained = [r for r in by_id.values() if "alpha > 0" in r.constraints]
    assert constrained
    rep = verify_identity(constrained[0], 20, max_terms=200)
    assert rep.probe_alpha is not None and rep.probe_failed is True


def test_report_is_byte_stable(by_id):
    rec = by_id["equ.nekey4x"]
    a = json.dumps(verify_identity(rec, 30).to_dict())
    b = json.dumps(verify_identity(rec, 30).to_dict())
    assert a == b
    assert "wall_time" not in a
    assert "wall_time" in verify_identity(rec, 10).to_dict(timing=True)


def test_low_precision_catalog_run(records):
    reports = verify_all(records, digits=5)
    assert [r.id for r in reports] == sorted(r.id for r in records)
    s = summarize(reports)
    assert s.passed == s.total == len(records)


def test_worker_pool_preserves_order(records):
    subset = records[:4]
    serial = verify_all(subset, digits=8, jobs=1, residual_scan=20)
    pooled = verify_all(subset, digits=8, jobs=2, residual_scan=20)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in pooled]


def test_injected_wrong_rhs_fails_exactly_that_record():
    doc = copy.deepcopy(read_document(bundled_catalog_path()))
    doc["records"] = doc["records"][:6]
    for r in doc["records"]:
        if r["id"] == "equ.mvf2qbz":
            r["rhs"] = "pi^2/9"
    reports = verify_all(load_catalog(doc), digits=10, residual_scan=20)
    assert summarize(reports).failed_ids == ["equ.mvf2qbz"]
