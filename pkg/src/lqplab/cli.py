"""
Command-line driver.

``lqplab run <config>`` runs one experiment and writes its JSON report (plus
CSV ladders); ``lqplab list-experiments`` prints the available kinds. The
exit code is 0 when every asserted check passes, 1 on a failed check, 2 on a
configuration or precondition error and 3 on numerical non-convergence.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from colorama import Fore, Style
from colorama import init as colorama_init

from lqplab._version import __version__
from lqplab.config import load_experiment, settings, setup_logging
from lqplab.config.settings import ALLOWED_LOG_LEVELS
from lqplab.errors import ConfigError
from lqplab.experiments import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    ExperimentReport,
    listing,
    run_experiment,
)
from lqplab.experiments.report import CheckStatus

logger = logging.getLogger(__name__)

_STATUS_COLOR = {
    CheckStatus.PASS: Fore.GREEN,
    CheckStatus.FAIL: Fore.RED,
    CheckStatus.ADVISORY: Fore.YELLOW,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lqplab",
        description=(
            "Numerical experiments on L_{q,p}-cohomology and Sobolev inequalities"
        ),
    )
    parser.add_argument("--version", action="version", version=f"lqplab {__version__}")
    parser.add_argument(
        "--log-level",
        choices=sorted(ALLOWED_LOG_LEVELS),
        default=None,
        help="Logging level (default: LQPLAB_LOG_LEVEL)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run one experiment from a JSON config")
    run.add_argument("config", type=Path, help="Path to the experiment JSON file")
    run.add_argument(
        "--output-dir",
        type=Path,
        default=None,
        help=(
            "Report directory (default: the config's output.directory, "
            "then LQPLAB_OUTPUT_DIR)"
        ),
    )
    run.add_argument("--no-csv", action="store_true", help="Skip the CSV ladders")
    run.add_argument("--quiet", action="store_true", help="Only print the summary line")

    commands.add_parser(
        "list-experiments", help="List experiment kinds and their anchors"
    )
    return parser


def _print_checks(report: ExperimentReport) -> None:
    for record in report.checks:
        color = _STATUS_COLOR[record.status]
        label = record.status.value.upper()
        print(f"  {color}{label:<8}{Style.RESET_ALL} {record.name}: {record.value}")


def _print_summary(report: ExperimentReport, paths: List[Path]) -> None:
    if report.error is not None:
        print(
            f"{Fore.RED}[{report.kind}] ERROR{Style.RESET_ALL} "
            f"{report.error['type']}: {report.error['message']}"
        )
    elif report.passed:
        print(
            f"{Fore.GREEN}[{report.kind}] OK{Style.RESET_ALL} "
            f"({len(report.checks)} checks)"
        )
    else:
        print(
            f"{Fore.RED}[{report.kind}] FAIL{Style.RESET_ALL} "
            f"({len(report.failures)} of {len(report.checks)} checks failed)"
        )
    for path in paths:
        print(f"  wrote {path}")


def command_run(args: argparse.Namespace) -> int:
    try:
        config = load_experiment(args.config)
    except ConfigError as e:
        print(f"{Fore.RED}[error]{Style.RESET_ALL} {e}")
        return EXIT_CONFIG
    report = run_experiment(config)
    directory = args.output_dir or config.output.directory or settings.OUTPUT_DIR
    basename = config.output.basename or config.name
    paths = report.write(directory, basename, config.output.csv and not args.no_csv)
    if not args.quiet:
        _print_checks(report)
    _print_summary(report, paths)
    return report.exit_code


def command_list() -> int:
    for line in listing():
        print(line)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level or settings.LOG_LEVEL)
    colorama_init()
    if args.command == "list-experiments":
        return command_list()
    try:
        return command_run(args)
    except Exception:
        logger.exception("Unexpected error while running %s", args.config)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
