"""
Main entry point for the glt-geomean package.

This module provides the command-line interface for the package.
It can be invoked via:
- The `glt-geomean` command (after installation)
- `python -m glt_geomean`
- Direct import and call to main()

Exit codes: 0 on success, 1 when an experiment fails or the output directory
cannot be written, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from rich.console import Console

from . import report
from .config import load_config
from .errors import ConfigError, ExperimentError
from .experiments import (
    CATALOG_IDS,
    DEFAULT_N_LIST,
    ExperimentSpec,
    catalog_specs,
    cross_check_means,
    run_experiment,
)
from .spectra import ZERO_THRESHOLD
from .symbol import DEFAULT_GRID, DEFAULT_TOL
from .types import RunConfig
from .utils import find_settings_file, read_run_defaults

logging.basicConfig(
    level=logging.INFO,
    format="%(levelname)s: %(message)s",
    handlers=[logging.StreamHandler(sys.stderr)],
)

logger = logging.getLogger(__name__)


def _int_tuple(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glt-geomean",
        description="Spectral-distribution experiments for geometric means of GLT matrix sequences",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Log warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("list", help="List the built-in experiments")

    run = commands.add_parser("run", help="Run experiments and write their reports")
    run.add_argument(
        "ids",
        nargs="*",
        help=f"Experiment ids ({', '.join(CATALOG_IDS)}) or 'all'",
    )
    run.add_argument(
        "--n",
        dest="n_list",
        type=_int_tuple,
        help="Comma-separated sequence parameters (default: 40,80,160,320)",
    )
    run.add_argument(
        "--out",
        dest="out_dir",
        type=Path,
        help="Output directory for CSV and SVG files (default: results)",
    )
    run.add_argument(
        "--grid",
        type=_int_tuple,
        help="Symbol sampling grid MX,MTHETA (default: 40,50)",
    )
    run.add_argument("--threshold", type=float, help="Zero-cluster threshold (default: 0.1)")
    run.add_argument(
        "--tol",
        type=float,
        help="Convergence tolerance of numerically computed candidate symbols (default: 1e-8)",
    )
    run.add_argument("--svg", action="store_true", help="Render quantile overlays as SVG")
    run.add_argument(
        "--config",
        dest="config_path",
        type=Path,
        help="JSON file with user-defined experiments (see docs/REFERENCE.md)",
    )
    run.add_argument("--threads", type=int, help="Worker threads (default: 1)")
    run.add_argument(
        "--cross-check",
        dest="cross_check",
        type=int,
        metavar="N",
        help="Also compare the geometric mean with (A B^2 A)^(1/4) at this n",
    )
    return parser


def parse_args(argv: list[str] | None = None) -> RunConfig:
    """
    Parse the command line into a run configuration.

    Values missing from the command line come from the [tool.glt-geomean]
    section of the nearest pyproject.toml, then from the built-in defaults.

    Raises:
        SystemExit: With code 2 on usage errors
        ConfigError: If the pyproject defaults are malformed
    """
    parser = _build_parser()
    args = parser.parse_args(argv)
    verbosity = 1 if args.verbose else -1 if args.quiet else 0
    if args.command == "list":
        return RunConfig(command="list", verbosity=verbosity)

    defaults: dict[str, object] = {
        "n_list": DEFAULT_N_LIST,
        "grid": DEFAULT_GRID,
        "threshold": ZERO_THRESHOLD,
        "tol": DEFAULT_TOL,
        "out_dir": Path("results"),
        "threads": 1,
    }
    settings_file = find_settings_file()
    if settings_file is not None:
        defaults.update(read_run_defaults(settings_file))
    for key in defaults:
        value = getattr(args, key)
        if value is not None:
            defaults[key] = value

    ids: list[str] = []
    for experiment_id in args.ids:
        if experiment_id == "all":
            ids.extend(i for i in CATALOG_IDS if i not in ids)
        elif experiment_id in CATALOG_IDS:
            if experiment_id not in ids:
                ids.append(experiment_id)
        else:
            parser.error(f"unknown experiment '{experiment_id}' (known: {', '.join(CATALOG_IDS)}, all)")
    if not ids and args.config_path is None:
        parser.error("run needs experiment ids, 'all', or --config FILE")

    n_list = tuple(defaults["n_list"])  # type: ignore[arg-type]
    if not n_list or any(n < 2 for n in n_list) or any(b <= a for a, b in zip(n_list, n_list[1:])):
        parser.error(f"--n entries must be >= 2 and strictly increasing, got {n_list}")
    grid = tuple(defaults["grid"])  # type: ignore[arg-type]
    if len(grid) != 2 or min(grid) < 1:
        parser.error(f"--grid expects two positive integers, got {grid}")
    if float(defaults["threshold"]) < 0:  # type: ignore[arg-type]
        parser.error("--threshold must be >= 0")
    if not float(defaults["tol"]) > 0:  # type: ignore[arg-type]
        parser.error("--tol must be positive")
    if int(defaults["threads"]) < 1:  # type: ignore[arg-type]
        parser.error("--threads must be >= 1")
    if args.cross_check is not None and args.cross_check < 2:
        parser.error("--cross-check must be >= 2")

    return RunConfig(
        command="run",
        experiment_ids=ids,
        config_path=args.config_path,
        n_list=n_list,
        out_dir=Path(defaults["out_dir"]),  # type: ignore[arg-type]
        grid=(grid[0], grid[1]),
        threshold=float(defaults["threshold"]),  # type: ignore[arg-type]
        tol=float(defaults["tol"]),  # type: ignore[arg-type]
        svg=args.svg,
        threads=int(defaults["threads"]),  # type: ignore[arg-type]
        cross_check=args.cross_check,
        verbosity=verbosity,
    )


def _collect_specs(config: RunConfig) -> list[ExperimentSpec]:
    # Run settings apply to the catalog; JSON experiments carry their own.
    specs = [
        replace(spec, n_list=config.n_list, grid=config.grid, threshold=config.threshold)
        for spec in catalog_specs(config.experiment_ids)
    ]
    if config.config_path is not None:
        specs.extend(load_config(config.config_path))
    return specs


def run_config(config: RunConfig, console: Console | None = None) -> int:
    """
    Execute a parsed configuration.

    Every experiment runs even if an earlier one fails; failures are logged
    and reflected in the exit code.

    Returns:
        Exit code (0 for success, 1 for experiment or I/O failures, 2 for
        configuration errors)
    """
    console = console or Console()
    if config.command == "list":
        entries = [(spec.id, spec.description) for spec in catalog_specs()]
        report.print_tables([report.catalog_table(entries)], console)
        return 0

    try:
        specs = _collect_specs(config)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2

    try:
        config.out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        print(f"Error: cannot create output directory {config.out_dir}: {e}", file=sys.stderr)
        return 1

    failures = 0
    for spec in specs:
        try:
            result = run_experiment(
                spec, workers=config.threads, out_dir=config.out_dir, svg=config.svg, tol=config.tol
            )
            tables = [report.report_table(result)]
            if config.cross_check is not None:
                check = cross_check_means(spec, config.cross_check, tol=config.tol)
                tables.append(report.cross_check_table(spec.id, check))
            report.print_tables(tables, console)
        except (ExperimentError, ValueError, OSError) as e:
            failures += 1
            logger.error(f"{spec.id}: {e}")
    if failures:
        logger.warning(f"{failures} of {len(specs)} experiment(s) failed")
    return 1 if failures else 0


def main(argv: list[str] | None = None) -> int:
    """
    Main entry point for the command line.

    Returns:
        Exit code (0 for success, non-zero for errors)
    """
    try:
        config = parse_args(argv)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2

    level = {-1: logging.WARNING, 0: logging.INFO, 1: logging.DEBUG}[config.verbosity]
    logging.getLogger().setLevel(level)
    return run_config(config)


if __name__ == "__main__":
    sys.exit(main())
