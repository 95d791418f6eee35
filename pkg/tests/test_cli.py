import csv
import json

import pytest

from artifact.cli import nees_band, run


def body(path):
    """Report content without the timestamped first line."""
    return path.read_text().split("\n", 1)[1]


@pytest.mark.parametrize(
    "argv",
    [
        ["interp", "--mode", "slerp"],
        ["interp", "--mode", "sclerp", "--angle-deg", "60", "--translation", "1.5"],
        ["jacobian-audit", "--samples", "5"],
        ["jacobian-audit", "--group", "se3", "--samples", "5"],
        ["fit-pose", "--group", "se3"],
        ["randomwalk", "--order", "2", "--trials", "2000", "--t", "1", "--tolerance", "0.1"],
        ["integrate-order", "--steps-list", "25,50,100"],
        ["ekf-attitude", "--runs", "3", "--steps", "100"],
    ],
)
def test_subcommands_pass(argv, tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert run(argv + ["--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["pass"] is True
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# " + argv[0])
    assert len(list(csv.reader(lines[1:]))) >= 2


def test_threshold_failure_exit_code(tmp_path, capsys):
    argv = ["fit-pose", "--pairs", "20", "--outliers", "1", "--kernel", "none", "--out", str(tmp_path / "f.csv")]
    assert run(argv) == 1
    assert json.loads(capsys.readouterr().out)["pass"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["no-such-command"],
        [],
        ["randomwalk", "--order", "5"],
        ["randomwalk", "--trials", "-3"],
        ["interp", "--tolerance", "0"],
        ["integrate-order", "--steps-list", "10,x"],
    ],
)
def test_usage_errors(argv, tmp_path, capsys):
    assert run(argv + ["--out", str(tmp_path / "x.csv")] if argv else argv) == 2


def test_unwritable_output(tmp_path):
    assert run(["interp", "--out", str(tmp_path / "missing" / "r.csv")]) == 2


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_reports_are_deterministic(fmt, tmp_path):
    paths = [tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"]
    for p in paths:
        run(["fit-pose", "--seed", "3", "--format", fmt, "--out", str(p)])
    assert body(paths[0]) == body(paths[1])


def test_json_report_layout(tmp_path):
    out = tmp_path / "r.json"
    run(["jacobian-audit", "--samples", "3", "--format", "json", "--out", str(out)])
    doc = json.loads(out.read_text())
    assert doc["metadata"]["command"] == "jacobian-audit"
    assert "timestamp" in doc["metadata"]
    assert len(doc["records"]) == 32
    assert doc["summary"]["rows"] == 32


def test_csv_floats_roundtrip(tmp_path):
    out = tmp_path / "r.csv"
    run(["interp", "--mode", "sclerp", "--out", str(out)])
    rows = list(csv.DictReader(out.read_text().splitlines()[1:]))
    assert float(rows[0]["tz"]) == 1.0


def test_nees_band_single_run():
    lo, hi = nees_band(3, 1)
    assert lo == pytest.approx(0.2158, abs=1e-4)
    assert hi == pytest.approx(9.3484, abs=1e-4)
