"""Experiment suites, their registry and the JSON/CSV reports they produce."""

from lqplab.experiments.registry import KINDS, ExperimentKind, anchor, listing
from lqplab.experiments.report import (
    SCHEMA_VERSION,
    CheckRecord,
    CheckStatus,
    ExperimentReport,
    Ladder,
    jsonable,
)
from lqplab.experiments.runners import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_NONCONVERGENCE,
    EXIT_OK,
    RUNNERS,
    build_form,
    exit_code_for,
    run_experiment,
)

__all__ = [
    "EXIT_CHECK_FAILED",
    "EXIT_CONFIG",
    "EXIT_NONCONVERGENCE",
    "EXIT_OK",
    "KINDS",
    "RUNNERS",
    "SCHEMA_VERSION",
    "CheckRecord",
    "CheckStatus",
    "ExperimentKind",
    "ExperimentReport",
    "Ladder",
    "anchor",
    "build_form",
    "exit_code_for",
    "jsonable",
    "listing",
    "run_experiment",
]
