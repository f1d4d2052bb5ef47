import copy
import io
import json
import subprocess
import sys

import pytest

from atansum.catalog.records import bundled_catalog_path, read_document
from atansum.cli import CSV_COLUMNS, loglog_slope, main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_verify_one_record_to_fifty_digits():
    code, out, _ = run("verify", "equ.nekey4x", "--digits", "50")
    assert code == 0
    assert "1.5707963267948966192313216916397514420985846996876" in out


def test_unknown_id_is_a_usage_error():
    code, _, err = run("verify", "no.such.id")
    assert code == 2 and "unknown id" in err


@pytest.mark.parametrize("digits", ["0", "10001", "abc"])
def test_digits_range(digits):
    assert run("verify", "equ.nekey4x", "--digits", digits)[0] == 2


def test_json_report_is_byte_stable():
    a = run("verify", "equ.mvf2qbz", "sec1-well-known", "--format", "json")
    b = run("verify", "equ.mvf2qbz", "sec1-well-known", "--format", "json")
    assert a == b and a[0] == 0
    doc = json.loads(a[1])
    assert doc["summary"]["passed"] == 2
    assert [r["id"] for r in doc["reports"]] == sorted(["equ.mvf2qbz", "sec1-well-known"])


def test_csv_columns():
    code, out, _ = run("verify", "equ.mvf2qbz", "--format", "csv")
    header, row = out.strip().splitlines()
    assert header.split(",") == CSV_COLUMNS
    assert row.startswith("equ.mvf2qbz,True,True,1.23370055013616982735431137")


def test_eval_quarter_pi_plus_atan_half():
    code, out, _ = run("eval", "--f", "k", "--alpha", "1", "--m", "1", "--q", "2", "--variant", "L1")
    assert code == 0 and "1.24904577239825442582991707728" in out and "match        yes" in out


def test_eval_json():
    code, out, _ = run("eval", "--f", "k^2-k", "--alpha", "1/2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["match"] and doc["lhs"]["value"].startswith("1.570796326794896619231321691")
    assert doc["closed_form"] == "1/2*pi"


@pytest.mark.parametrize("argv", [
    ("--f", "k", "--alpha", "1", "--q", "2", "--variant", "L2_ODD"),
    ("--f", "k+", "--alpha", "1"),
    ("--f", "1-k", "--alpha", "1"),
    ("--f", "k", "--alpha", "x"),
])
def test_eval_usage_errors(argv):
    code, _, err = run("eval", *argv)
    assert code == 2 and err.startswith("atansum: error:")


def test_expand_angle():
    code, out, _ = run("expand-angle", "--theta", "pi/3", "--family", "quartic", "--digits", "20", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["match"] and doc["certified_digits"] >= 20
    assert doc["terms"][0]["symbolic"] == "atan(1/2*sqrt(3))"  # k*sqrt(3)/(k^4+1) at k=1


def test_expand_angle_zero_and_out_of_range():
    code, out, _ = run("expand-angle", "--theta", "0")
    assert code == 0 and "sum     0.0" in out
    assert run("expand-angle", "--theta", "pi/2")[0] == 2


def test_convergence_table():
    code, out, _ = run("convergence", "equ.macv3oy", "--points", "10,100", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "N,error,predicted" and len(lines) == 3
    assert run("convergence", "nope")[0] == 2


def test_loglog_slope_of_a_power_law():
    rows = [{"N": n, "error": 1.0 / n**2} for n in (10, 100, 1000)]
    assert abs(loglog_slope(rows) + 2) < 1e-12


def test_family_and_binding_commands():
    assert run("family", "thm.sveqk2u", "alpha=1", "beta=0", "m=1", "q=5")[0] == 0
    code, _, err = run("family", "thm.hy3p7rx", "alpha=1", "beta=0", "m=1", "q=2")
    assert code == 2 and "q odd" in err
    assert run("family", "thm.unknown")[0] == 2
    assert run("family", "thm.sveqk2u", "alpha")[0] == 2
    assert run("binding", "equ.aixbx8z", "alpha=2")[0] == 0
    assert run("binding", "equ.aixbx8z", "alpha=3")[0] == 1
    assert run("binding", "no.such.binding")[0] == 2


def test_listings():
    code, out, _ = run("list")
    assert code == 0 and "equ.nekey4x" in out
    assert "theta-linear" in run("family")[1]
    assert "equ.aixbx8z" in run("binding")[1]


def test_catalog_from_environment(tmp_path, monkeypatch):
    doc = copy.deepcopy(read_document(bundled_catalog_path()))
    doc["records"] = [r for r in doc["records"] if r["id"] == "equ.nekey4x"]
    path = tmp_path / "one.json"
    path.write_text(json.dumps(doc))
    monkeypatch.setenv("ATANSUM_CATALOG", str(path))
    code, out, _ = run("list")
    assert code == 0 and out.count("\n") == 1


def test_missing_catalog_file(tmp_path):
    code, _, err = run("list", "--catalog", str(tmp_path / "absent.json"))
    assert code == 2 and "error" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "atansum", "verify", "sec1-well-known", "--digits", "10"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
