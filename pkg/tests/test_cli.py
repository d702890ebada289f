"""
Tests for the command-line driver.
"""

import json
from pathlib import Path

import pytest

from lqplab.cli import main

ROOT = Path(__file__).resolve().parents[1]
EXPERIMENTS = ROOT / "src" / "lqplab" / "config" / "experiments"


def write_config(tmp_path, **overrides):
    data = {
        "kind": "complex-analyze",
        "name": "cli_complex",
        "random": {"dims": [3, 5, 4], "ranks": [2, 2]},
        "expected_cohomology": {"1": 1},
    }
    data.update(overrides)
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_list_experiments(capsys):
    assert main(["list-experiments"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 9
    assert all(" -> " in line for line in lines)


def test_run_writes_report(tmp_path, capsys):
    config = write_config(tmp_path)
    out = tmp_path / "reports"
    assert main(["run", str(config), "--output-dir", str(out)]) == 0
    assert (out / "cli_complex.json").exists()
    assert (out / "cli_complex.levels.csv").exists()
    report = json.loads((out / "cli_complex.json").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert "[complex-analyze] OK" in capsys.readouterr().out


def test_run_without_csv(tmp_path):
    config = write_config(tmp_path, output={"basename": "only_json"})
    out = tmp_path / "reports"
    args = ["run", str(config), "--output-dir", str(out), "--no-csv", "--quiet"]
    assert main(args) == 0
    assert sorted(p.name for p in out.iterdir()) == ["only_json.json"]


def test_failed_check_exit_code(tmp_path, capsys):
    config = write_config(tmp_path, expected_cohomology={"1": 3})
    assert main(["run", str(config), "--output-dir", str(tmp_path)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_bad_config_exit_code(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.json")]) == 2
    assert "[error]" in capsys.readouterr().out
    broken = tmp_path / "broken.json"
    broken.write_text('{"kind": "hodge"', encoding="utf-8")
    assert main(["run", str(broken)]) == 2
    unknown = write_config(tmp_path, kind="spectral-sequence")
    assert main(["run", str(unknown)]) == 2


def test_sobolev_range_config_is_a_precondition_error(tmp_path, capsys):
    """The shipped config inside the Sobolev range stops with exit code 2."""
    config = EXPERIMENTS / "ball_witness_sobolev_range.json"
    assert main(["run", str(config), "--output-dir", str(tmp_path)]) == 2
    assert "EmptyMuInterval" in capsys.readouterr().out
    written = tmp_path / "ball_witness_sobolev_range.json"
    report = json.loads(written.read_text("utf-8"))
    assert report["error"]["type"] == "EmptyMuInterval"
    assert report["passed"] is False


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.startswith("lqplab ")


def test_shipped_four_laplace_config_converges(tmp_path):
    config = EXPERIMENTS / "pde_circle_p4.json"
    code = main(
        ["run", str(config), "--output-dir", str(tmp_path), "--no-csv", "--quiet"]
    )
    report = json.loads((tmp_path / "pde_circle_p4.json").read_text("utf-8"))
    assert report["results"]["trace"]["termination"] == "converged"
    assert code == 0
