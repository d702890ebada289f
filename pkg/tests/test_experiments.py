"""
Tests for experiment dispatch, reports and exit codes.
"""

import json

import numpy as np
import pytest

from lqplab.config.experiment import parse_experiment
from lqplab.errors import (
    CheckFailure,
    ConfigError,
    EmptyMuInterval,
    NonConvergenceError,
    RootFindingError,
)
from lqplab.experiments import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_NONCONVERGENCE,
    EXIT_OK,
    KINDS,
    RUNNERS,
    CheckStatus,
    exit_code_for,
    jsonable,
    listing,
    run_experiment,
)


def random_complex_config(**overrides):
    data = {
        "kind": "complex-analyze",
        "name": "random_complex",
        "random": {"dims": [3, 5, 4], "ranks": [2, 2]},
        "seed": 4,
        "expected_cohomology": {"0": 1, "1": 1, "2": 2},
    }
    data.update(overrides)
    return parse_experiment(data)


def test_registry_covers_every_runner():
    assert set(KINDS) == set(RUNNERS)
    lines = listing()
    assert len(lines) == 9
    assert lines[0].startswith("sobolev-verify -> ")
    assert any(line.startswith("ball-witness -> ") for line in lines)
    assert any(line.startswith("hodge -> Hodge-Kodaira") for line in lines)


def test_exit_codes_follow_error_families():
    assert exit_code_for(None) == EXIT_OK
    assert exit_code_for(ConfigError("bad")) == EXIT_CONFIG
    assert exit_code_for(EmptyMuInterval("empty", (0.0, -1.0))) == EXIT_CONFIG
    slow = NonConvergenceError("slow", residual=1.0)
    assert exit_code_for(slow) == EXIT_NONCONVERGENCE
    no_root = RootFindingError("no root", (0.0, 1.0))
    assert exit_code_for(no_root) == EXIT_NONCONVERGENCE
    assert exit_code_for(CheckFailure("failed")) == EXIT_CHECK_FAILED
    assert exit_code_for(ValueError("unexpected")) == EXIT_CHECK_FAILED


def test_complex_experiment_passes():
    report = run_experiment(random_complex_config())
    assert report.exit_code == EXIT_OK, [c.to_dict() for c in report.failures]
    assert report.passed
    assert report.results["cohomology"] == {0: 1, 1: 1, 2: 2}
    assert len(report.ladders["levels"].rows) == 2
    assert report.anchor == KINDS["complex-analyze"].anchor


def test_failed_check_gives_exit_one():
    report = run_experiment(random_complex_config(expected_cohomology={"0": 5}))
    assert report.exit_code == EXIT_CHECK_FAILED
    assert len(report.failures) == 1
    assert report.failures[0].status is CheckStatus.FAIL
    assert report.error is None


def test_precondition_error_is_reported():
    """Inside the Sobolev range the ball witness stops with the empty mu interval."""
    config = parse_experiment(
        {"kind": "ball-witness", "name": "inside", "p": 2, "q": 2}
    )
    report = run_experiment(config)
    assert report.exit_code == EXIT_CONFIG
    assert report.error["type"] == "EmptyMuInterval"
    assert report.error["interval"] == pytest.approx([0.0, -1.0])
    assert not report.passed


def test_unknown_symbol_is_a_config_error():
    config = parse_experiment(
        {
            "kind": "hodge",
            "name": "bad_symbol",
            "domain": {"kind": "circle"},
            "resolution": 8,
            "samples": 1,
            "form": {"degree": 0, "components": ["sin(w)"]},
        }
    )
    report = run_experiment(config)
    assert report.exit_code == EXIT_CONFIG
    assert report.error["type"] == "ConfigError"
    assert "sin(w)" in report.error["message"]


def test_incompatible_pde_source_is_refused():
    config = parse_experiment(
        {
            "kind": "pde-solve",
            "name": "incompatible",
            "domain": {"kind": "circle"},
            "source": {"degree": 0, "components": ["1 + cos(x)"]},
            "p": 3,
            "resolution": 64,
            "expect": "incompatible",
        }
    )
    report = run_experiment(config)
    assert report.exit_code == EXIT_OK
    names = {c.name: c.status for c in report.checks}
    assert names["solver refuses the source"] is CheckStatus.PASS
    assert report.results["compatibility"]["compatible"] is False


def test_reports_are_deterministic(tmp_path):
    """Without timing, two runs of one config write byte-identical files."""
    first = run_experiment(random_complex_config()).write(tmp_path / "a", "run")
    second = run_experiment(random_complex_config()).write(tmp_path / "b", "run")
    assert [p.name for p in first] == ["run.json", "run.levels.csv"]
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()
    data = json.loads(first[0].read_text(encoding="utf-8"))
    assert data["schema_version"] == 1
    assert "wall_clock_seconds" not in data
    assert first[1].read_text(encoding="utf-8").splitlines()[0] == (
        "level,cohomology,corrector,image"
    )


def test_timing_is_opt_in():
    report = run_experiment(random_complex_config(record_timing=True))
    assert report.timing is not None
    assert "wall_clock_seconds" in report.to_dict()


def test_jsonable_handles_numpy_and_infinity():
    data = jsonable({"a": np.float64(1.5), 2: np.array([1, 2]), "b": float("inf")})
    assert data == {"a": 1.5, "2": [1, 2], "b": "inf"}
