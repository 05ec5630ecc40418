import csv
import json
import os
import subprocess
import sys

import pytest

from maxaffine.cli import main


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse rejects malformed options itself
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_cantor_build_ternary(capsys):
    code, out, _ = run(capsys, "cantor-build", "--schedule", "ternary", "--depth", "2")
    assert code == 0
    assert "components = [0, 1/9] U [2/9, 1/3] U [2/3, 7/9] U [8/9, 1]" in out
    assert "lambda(C) = 0" in out
    assert "lambda(C_2) = 4/9" in out


def test_cantor_build_json(tmp_path, capsys):
    path = tmp_path / "c.json"
    code, out, _ = run(capsys, "cantor-build", "--c", "1/2", "--depth", "3", "--out", str(path))
    assert code == 0 and "lambda(C) = 5/6" in out
    doc = json.loads(path.read_text())
    assert doc["depth"] == 3 and len(doc["components"]) == 8


def test_cantor_build_deep_summary_only(capsys):
    code, out, _ = run(capsys, "cantor-build", "--c", "1/2", "--depth", "40")
    assert code == 0
    assert "components" not in out
    assert "tail = " in out


@pytest.mark.parametrize(
    "argv",
    [
        ["cantor-build", "--c", "1/2", "--k", "1/2", "--depth", "3"],
        ["cantor-build", "--c", "0.5", "--depth", "3"],
        ["cantor-build", "--depth", "3"],
        ["cantor-build", "--c", "1/2", "--depth", "0"],
        ["cantor-build", "--c", "1/2", "--depth", "30", "--out", "x.json"],
        ["verify-lemma", "--c", "1/2", "--k", "1/2"],
        ["verify-failure", "--c", "1"],
        ["verify-failure", "--c", "1/2", "--slope", "1/2"],
        ["aap-approx", "--eps", "2"],
        ["tent-example", "--n", "30"],
        ["tent-example", "--n", "1"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error:" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify-failure", "--format", "xml"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_io_error_exit_1(tmp_path, capsys):
    missing = tmp_path / "nope" / "out.json"
    code, _, _ = run(capsys, "cantor-build", "--c", "1/2", "--depth", "2", "--out", str(missing))
    assert code == 1
    code, _, _ = run(capsys, "report", "--input", str(tmp_path / "absent.json"))
    assert code == 1


def test_verify_lemma_and_report(tmp_path, capsys):
    path = tmp_path / "lemma.json"
    code, out, _ = run(capsys, "verify-lemma", "--c", "1/2", "--grid-step", "1/32", "--out", str(path))
    assert code == 0
    assert "inconclusive=0" in out
    code, out, _ = run(capsys, "report", "--input", str(path))
    assert code == 0 and "inconclusive=0" in out


def test_report_exit_3_on_inconclusive(tmp_path, capsys):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"summary": {"total": 4, "certified": 3, "inconclusive": 1}}))
    assert run(capsys, "report", "--input", str(path))[0] == 3
    path.write_text(json.dumps({"cells": []}))
    assert run(capsys, "report", "--input", str(path))[0] == 2
    path.write_text("{not json")
    assert run(capsys, "report", "--input", str(path))[0] == 2


def test_verify_failure_csv(tmp_path, capsys):
    path = tmp_path / "f.csv"
    code, out, _ = run(capsys, "verify-failure", "--grid-step", "1/16", "--format", "csv", "--out", str(path))
    assert code == 0 and "inconclusive=0" in out
    rows = list(csv.DictReader(path.open()))
    assert rows and all(r["status"] == "certified" for r in rows)
    assert all(float(r["margin_lo_float"]) > 0 for r in rows)


def test_aap_approx(tmp_path, capsys):
    path = tmp_path / "aap.json"
    code, out, _ = run(capsys, "aap-approx", "--count", "10", "--out", str(path))
    assert code == 0
    assert "instances=20 passed=20 failed=0" in out
    assert json.loads(path.read_text())["summary"]["passed"] == 20


def test_tent_example(tmp_path, capsys):
    path = tmp_path / "tent.csv"
    code, out, _ = run(capsys, "tent-example", "--n", "6", "--out", str(path))
    assert code == 0
    assert "lip=1 (ok)" in out
    assert "quotient at (3/4, 1/4) = (1, 0, 0, 0, 0, 0)" in out
    lines = path.read_text().splitlines()
    assert lines[0] == "t,e1,e2,e3,e4,e5,e6"
    assert len(lines) == 2**6 + 1
    # t = 1/4: e2 is the distance to the nearest integer, e3 to the nearest half
    assert lines[1 + 16].split(",") == ["0.25", "0.25", "0.25", "0.25", "0", "0", "0"]


def test_outputs_are_deterministic(tmp_path, capsys):
    blobs = []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        run(capsys, "aap-approx", "--count", "5", "--seed", "3", "--out", str(path))
        blobs.append(path.read_bytes())
    assert blobs[0] == blobs[1]


def test_module_entry_point_with_threads(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    env = dict(os.environ, MAXAFFINE_THREADS="2")
    base = [sys.executable, "-m", "maxaffine", "verify-failure", "--grid-step", "1/16"]
    proc = subprocess.run(base + ["--out", str(out1)], env=env, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    env["MAXAFFINE_THREADS"] = "1"
    proc = subprocess.run(base + ["--out", str(out2)], env=env, capture_output=True, text=True)
    assert proc.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
