"""
Tests for configuration module.
"""

import json
import logging
from pathlib import Path
from unittest.mock import patch

import pytest

from lqplab.config.experiment import (
    BallWitnessExperiment,
    ComplexAnalyzeExperiment,
    DomainSpec,
    exponent_value,
    load_experiment,
    parse_experiment,
)
from lqplab.config.logging_config import build_logging_config, setup_logging
from lqplab.config.settings import Settings
from lqplab.errors import ConfigError

ROOT = Path(__file__).resolve().parents[1]
EXPERIMENTS = ROOT / "src" / "lqplab" / "config" / "experiments"


def test_settings_creation():
    """Test that Settings can be created with default values."""
    with patch.dict("os.environ", {"LQPLAB_LOG_LEVEL": "INFO"}, clear=True):
        settings = Settings()
        assert settings.OUTPUT_DIR == Path("results")
        assert settings.ENV == "development"
        assert settings.LOG_LEVEL == "INFO"


def test_settings_environment_overrides():
    """Test that LQPLAB_* variables override the defaults."""
    with patch.dict(
        "os.environ",
        {
            "LQPLAB_OUTPUT_DIR": "/tmp/lqplab-reports",
            "LQPLAB_ENV": "test",
            "LQPLAB_LOG_LEVEL": "debug",
        },
        clear=True,
    ):
        settings = Settings()
        assert settings.OUTPUT_DIR == Path("/tmp/lqplab-reports")
        assert settings.ENV == "test"
        assert settings.LOG_LEVEL == "DEBUG"


def test_settings_validation():
    """Test that LQPLAB_ENV validation works correctly."""
    with patch.dict("os.environ", {"LQPLAB_ENV": "invalid_env"}, clear=True):
        with pytest.raises(ValueError, match="LQPLAB_ENV must be one of"):
            Settings()


def test_settings_log_level_validation():
    """Test that unknown log levels are rejected."""
    with patch.dict("os.environ", {"LQPLAB_LOG_LEVEL": "chatty"}, clear=True):
        with pytest.raises(ValueError, match="LQPLAB_LOG_LEVEL must be one of"):
            Settings()


def test_settings_valid_environments():
    """Test that valid LQPLAB_ENV values are accepted."""
    for env in ["test", "development", "production"]:
        with patch.dict("os.environ", {"LQPLAB_ENV": env}, clear=True):
            settings = Settings()
            assert settings.ENV == env


def test_logging_config_levels(tmp_path):
    """The requested level reaches the console handler.

    A log directory adds a file handler.
    """
    config = build_logging_config("warning")
    assert config["handlers"]["console"]["level"] == "WARNING"
    assert config["loggers"]["lqplab"]["level"] == "WARNING"

    config = build_logging_config("INFO", tmp_path / "logs")
    assert "debug_file" in config["handlers"]
    assert config["loggers"]["lqplab"]["level"] == "DEBUG"
    assert (tmp_path / "logs").is_dir()


def test_setup_logging_applies_level():
    setup_logging("ERROR")
    assert logging.getLogger("lqplab").level == logging.ERROR
    setup_logging("INFO")


def test_exponent_values():
    """Exponents accept numbers, fractions and infinity."""
    assert exponent_value(2) == 2.0
    assert exponent_value("4/3") == pytest.approx(4.0 / 3.0)
    assert exponent_value("inf") == float("inf")


def test_parse_ball_witness():
    config = parse_experiment({"kind": "ball-witness", "name": "b", "p": "4/3", "q": 8})
    assert isinstance(config, BallWitnessExperiment)
    assert config.t_ladder == [1e-2, 1e-3, 1e-4]
    assert config.output.csv is True


def test_unknown_keys_rejected():
    """Test that unknown keys are a configuration error."""
    with pytest.raises(ConfigError, match="Invalid experiment configuration"):
        parse_experiment(
            {"kind": "hodge", "name": "h", "domain": {"kind": "circle"}, "bogus": 1}
        )


def test_unknown_kind_rejected():
    with pytest.raises(ConfigError):
        parse_experiment({"kind": "plotting", "name": "x"})


def test_nonpositive_tolerance_rejected():
    with pytest.raises(ConfigError):
        parse_experiment(
            {
                "kind": "hodge",
                "name": "h",
                "domain": {"kind": "circle"},
                "tolerances": {"identity": 0},
            }
        )


def test_exponent_below_one_rejected():
    with pytest.raises(ConfigError, match="exponent"):
        parse_experiment({"kind": "ball-witness", "name": "b", "p": 0.5, "q": 8})


def test_domain_spec_requires_bounds():
    with pytest.raises(ValueError, match="bounds"):
        DomainSpec(kind="box")
    box = DomainSpec(kind="box", bounds=[(-1.0, 1.0), (0.0, 2.0)]).build()
    assert box.dim == 2


def test_complex_needs_exactly_one_source():
    with pytest.raises(ConfigError, match="exactly one"):
        parse_experiment({"kind": "complex-analyze", "name": "c"})
    config = parse_experiment(
        {"kind": "complex-analyze", "name": "c", "random": {"dims": [3, 4]}}
    )
    assert isinstance(config, ComplexAnalyzeExperiment)


def test_pde_reference_degree_must_match():
    with pytest.raises(ConfigError, match="same degree"):
        parse_experiment(
            {
                "kind": "pde-solve",
                "name": "pde",
                "domain": {"kind": "circle"},
                "source": {"degree": 0, "components": ["sin(x)"]},
                "p": 2,
                "reference": {"degree": 1, "components": ["cos(x)"]},
            }
        )


def test_load_experiment_errors(tmp_path):
    """Missing files, bad JSON and non-object documents are configuration errors."""
    with pytest.raises(ConfigError, match="not found"):
        load_experiment(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_experiment(broken)
    listed = tmp_path / "list.json"
    listed.write_text(json.dumps([1, 2]), encoding="utf-8")
    with pytest.raises(ConfigError, match="JSON object"):
        load_experiment(listed)


def test_shipped_experiments_validate():
    """Every config shipped with the package passes schema validation."""
    paths = sorted(EXPERIMENTS.glob("*.json"))
    assert paths
    kinds = {load_experiment(path).kind for path in paths}
    assert len(kinds) == 9
