"""Experiment reports: check records, CSV ladders and deterministic JSON."""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import scipy
import sympy

from lqplab._version import __version__

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    ADVISORY = "advisory"


@dataclass
class CheckRecord:
    """One verified property: the measured value against what was expected.

    ``operation`` names the library operation that produced the value and
    ``anchor`` the statement it verifies. Advisory records are measurements
    without a pass criterion and never fail a run.
    """

    name: str
    value: Any
    expected: Any
    status: CheckStatus
    operation: str
    anchor: str

    @property
    def failed(self) -> bool:
        return self.status is CheckStatus.FAIL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "expected": self.expected,
            "status": self.status.value,
            "operation": self.operation,
            "anchor": self.anchor,
        }


@dataclass
class Ladder:
    """A table written as CSV with a header row."""

    name: str
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)

    def add(self, **values: Any) -> None:
        self.rows.append(values)

    def to_dict(self) -> Dict[str, Any]:
        return {"columns": self.columns, "rows": self.rows}


def jsonable(value: Any) -> Any:
    """Plain JSON data: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(value, Enum):
        return jsonable(value.value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(value, Path):
        return str(value)
    return value


def versions() -> Dict[str, str]:
    return {
        "lqplab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "sympy": sympy.__version__,
    }


@dataclass
class ExperimentReport:
    """Everything one experiment run produced."""

    kind: str
    name: str
    anchor: str
    config: Dict[str, Any]
    checks: List[CheckRecord] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    ladders: Dict[str, Ladder] = field(default_factory=dict)
    error: Optional[Dict[str, Any]] = None
    timing: Optional[float] = None
    exit_code: int = 0

    def check(
        self,
        name: str,
        value: Any,
        expected: Any,
        passed: Optional[bool],
        operation: str,
        anchor: Optional[str] = None,
    ) -> CheckRecord:
        """Append a record; ``passed=None`` makes it advisory."""
        if passed is None:
            status = CheckStatus.ADVISORY
        else:
            status = CheckStatus.PASS if passed else CheckStatus.FAIL
        record = CheckRecord(
            name,
            jsonable(value),
            jsonable(expected),
            status,
            operation,
            anchor or self.anchor,
        )
        self.checks.append(record)
        if record.failed:
            logger.warning("Check '%s' failed: %s (expected %s)", name, value, expected)
        return record

    def ladder(self, name: str, columns: List[str]) -> Ladder:
        table = Ladder(name, list(columns))
        self.ladders[name] = table
        return table

    @property
    def failures(self) -> List[CheckRecord]:
        return [c for c in self.checks if c.failed]

    @property
    def passed(self) -> bool:
        return self.error is None and not self.failures

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "name": self.name,
            "anchor": self.anchor,
            "passed": self.passed,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "results": self.results,
            "ladders": {k: v.to_dict() for k, v in self.ladders.items()},
            "error": self.error,
            "versions": versions(),
        }
        if self.timing is not None:
            out["wall_clock_seconds"] = self.timing
        return jsonable(out)

    def to_json(self) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
        return text + "\n"

    def write(
        self,
        directory: Path,
        basename: Optional[str] = None,
        csv_ladders: bool = True,
    ):
        """Write ``<basename>.json`` and one ``<basename>.<ladder>.csv`` per ladder.

        Returns:
            The written paths, JSON report first.
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        stem = basename or self.name
        report_path = directory / f"{stem}.json"
        report_path.write_text(self.to_json(), encoding="utf-8")
        paths = [report_path]
        if csv_ladders:
            for key in sorted(self.ladders):
                table = self.ladders[key]
                path = directory / f"{stem}.{key}.csv"
                with path.open("w", newline="", encoding="utf-8") as handle:
                    writer = csv.DictWriter(
                        handle, fieldnames=table.columns, lineterminator="\n"
                    )
                    writer.writeheader()
                    for row in table.rows:
                        writer.writerow(
                            {c: jsonable(row.get(c, "")) for c in table.columns}
                        )
                paths.append(path)
        logger.info("Wrote report %s (%d files)", report_path, len(paths))
        return paths
