import json
import subprocess
import sys

import pytest

from resolvent.cli import _digest, check_report, main, run

from conftest import PROBLEMS, load_raw


def invoke(tmp_path, *args):
    out = tmp_path / "out.txt"
    rc = main(list(args) + ["--output", str(out)])
    return rc, out.read_text()


def test_resolve_report_shape():
    rep = run("resolve", load_raw("diag_xy.json"))
    r = rep["result"]
    assert rep["command"] == "resolve" and rep["digest"]
    assert r["tower"]["blowups"] == 1 and r["tower"]["charts"] == 2
    assert r["h"][0] == 0
    assert "timing_seconds" not in rep
    assert "timing_seconds" in run("resolve", load_raw("diag_xy.json"), timing=True)


def test_euler_report():
    rep = run("euler", load_raw("p2_generic_d2.json"))
    assert rep["result"]["euler"] == 4 and rep["result"]["independent"]


def test_fitting_and_diagonalize_reports():
    rep = run("fitting", load_raw("fitting_diag.json"))
    assert [item["h"] for item in rep["result"]["fitting"]] == [0, 1, 2]
    rep = run("diagonalize", load_raw("generic_2x2.json"))
    assert rep["result"]["tower"]["charts"] == 4
    assert check_report(rep)["ok"]


@pytest.mark.parametrize("name", sorted(p.name for p in PROBLEMS.glob("*.json")))
def test_every_shipped_problem_checks(name, tmp_path):
    raw = load_raw(name)
    command = "euler" if "geometry" in raw else "fitting" if name.startswith("fitting") else "resolve"
    rc, text = invoke(tmp_path, command, "--input", str(PROBLEMS / name))
    assert rc == 0
    report = tmp_path / "report.json"
    report.write_text(text)
    rc, text = invoke(tmp_path, "check", "--input", str(report))
    assert rc == 0 and json.loads(text)["result"]["ok"]


def test_text_format(tmp_path):
    rc, text = invoke(tmp_path, "resolve", "--input", str(PROBLEMS / "koszul_row_a3.json"), "--format", "text")
    assert rc == 0 and "blowups     1" in text and "h^i         2 0" in text


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"ring": {"vars": ["x"]}, "objects": {"m": {"type": "matrix", "entries": [["x + * 1"]]}}}))
    rc, text = invoke(tmp_path, "resolve", "--input", str(bad))
    assert rc == 2 and json.loads(text)["error"]["reason"] == "ParseError"
    rc, text = invoke(tmp_path, "resolve", "--input", str(PROBLEMS / "koszul_row_a3.json"), "--max-depth", "0")
    assert rc == 3 and json.loads(text)["error"]["reason"] == "DepthExceeded"
    rc, _ = invoke(tmp_path, "resolve", "--input", str(tmp_path / "missing.json"))
    assert rc == 2
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    rc, _ = invoke(tmp_path, "check", "--input", str(garbage))
    assert rc == 4


def test_tampered_certificate_is_rejected(tmp_path):
    rep = run("resolve", load_raw("koszul_row_a3.json"))
    rep["result"]["leaves"][0]["certificates"][0]["diag"][0] = "y"
    # keep the digest consistent so only the certificate check can catch it
    rep["digest"] = _digest(rep)
    path = tmp_path / "t.json"
    path.write_text(json.dumps(rep))
    rc, text = invoke(tmp_path, "check", "--input", str(path))
    assert rc == 4 and json.loads(text)["error"]["reason"]


def test_console_script_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "resolvent.cli", "euler", "--input", str(PROBLEMS / "p1_base_point.json")],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0 and json.loads(out.stdout)["result"]["euler"] == -2
