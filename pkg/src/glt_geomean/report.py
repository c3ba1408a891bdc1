"""
Report emitters: CSV tables, SVG quantile overlays and console tables.

CSV files always carry a header row, use '.' as decimal point and write
floats with ``repr`` precision, so two runs of the same experiment produce
byte-identical files.
"""

from __future__ import annotations

import csv
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from rich.console import Console
from rich.table import Table

from .types import CrossCheck, ExperimentReport, QuantileCurve, SpectrumSample

logger = logging.getLogger(__name__)

REPORT_COLUMNS = (
    "n",
    "d_n",
    "lambda_min",
    "lambda_max",
    "cond2",
    "zero_fraction",
    "sup_dist",
    "mean_abs_dist",
)

# Fixed salt for SVG element ids; without it matplotlib draws a random one per file.
SVG_HASHSALT = "glt-geomean"


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info(f"wrote {path}")
    return path


def write_report_csv(report: ExperimentReport, out_dir: Path) -> Path:
    """``report_<id>.csv``: one row per n."""
    rows = (
        (
            row.n,
            row.d_n,
            row.lambda_min,
            row.lambda_max,
            row.cond2,
            row.zero_fraction,
            row.sup_dist,
            row.mean_abs_dist,
        )
        for row in report.rows
    )
    return _write_csv(out_dir / f"report_{report.experiment_id}.csv", REPORT_COLUMNS, rows)


def write_alpha_csv(report: ExperimentReport, out_dir: Path) -> Path:
    """``alpha_<id>.csv``: decay exponents, j counted from 1."""
    rows = ((j, alpha) for j, alpha in enumerate(report.alphas, start=1))
    return _write_csv(out_dir / f"alpha_{report.experiment_id}.csv", ("j", "alpha_j"), rows)


def write_quantile_csv(sample: SpectrumSample, out_dir: Path) -> Path:
    """``quantiles_<id>_<n>.csv``: sorted eigenvalues against ``t_i = (i - 1/2) / d_n``."""
    t = (np.arange(1, sample.d_n + 1) - 0.5) / sample.d_n
    rows = zip(t.tolist(), sample.values.tolist(), strict=True)
    path = out_dir / f"quantiles_{sample.experiment_id}_{sample.n}.csv"
    return _write_csv(path, ("t", "lambda"), rows)


def write_symbol_csv(experiment_id: str, curve: QuantileCurve, out_dir: Path) -> Path:
    """``symbol_<id>.csv``: the symbol's quantile curve."""
    rows = zip(curve.t.tolist(), curve.samples.tolist(), strict=True)
    return _write_csv(out_dir / f"symbol_{experiment_id}.csv", ("t", "value"), rows)


def render_overlay(sample: SpectrumSample, curve: QuantileCurve, out_dir: Path) -> Path:
    """``overlay_<id>_<n>.svg``: sorted spectrum drawn over the symbol's quantile curve."""
    path = out_dir / f"overlay_{sample.experiment_id}_{sample.n}.svg"
    path.parent.mkdir(parents=True, exist_ok=True)
    t = (np.arange(1, sample.d_n + 1) - 0.5) / sample.d_n
    with plt.rc_context({"svg.hashsalt": SVG_HASHSALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(curve.t, curve.samples, color="black", linewidth=1.5, label="symbol")
        ax.plot(t, sample.values, "o", markersize=2, color="tab:red", label=f"eigenvalues, n = {sample.n}")
        ax.set_xlabel("t")
        ax.set_ylabel("value")
        ax.set_title(sample.experiment_id)
        ax.legend(loc="upper left")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.info(f"wrote {path}")
    return path


def write_experiment(
    report: ExperimentReport,
    spectra: Sequence[SpectrumSample],
    curve: QuantileCurve,
    out_dir: Path,
    *,
    svg: bool = False,
) -> list[Path]:
    """Write every artifact of a finished run and return their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        write_report_csv(report, out_dir),
        write_alpha_csv(report, out_dir),
        write_symbol_csv(report.experiment_id, curve, out_dir),
    ]
    for sample in spectra:
        paths.append(write_quantile_csv(sample, out_dir))
        if svg:
            paths.append(render_overlay(sample, curve, out_dir))
    return paths


def report_table(report: ExperimentReport) -> Table:
    """Extremal eigenvalues, decay exponents and zero fractions, one row per n."""
    table = Table(title=f"{report.experiment_id}: {report.description}")
    for column in ("n", "d_n", "tau = lambda_min", "alpha", "lambda_max", "cond2"):
        table.add_column(column, justify="right")
    for column in ("zero fraction", "target error", "sup dist", "mean dist"):
        table.add_column(column, justify="right")
    alphas = ["", *(f"{a:.4f}" for a in report.alphas)]
    for row, alpha, error in zip(report.rows, alphas, report.target_errors, strict=False):
        table.add_row(
            str(row.n),
            str(row.d_n),
            f"{row.lambda_min:.4e}",
            alpha,
            f"{row.lambda_max:.8f}",
            f"{row.cond2:.3e}",
            f"{row.zero_fraction:.4f}",
            f"{error:.4f}",
            f"{row.sup_dist:.4e}",
            f"{row.mean_abs_dist:.4e}",
        )
    table.caption = (
        f"target zero measure {report.target_zero_measure:.4f}; "
        f"symbol range [{report.symbol_min:.4g}, {report.symbol_max:.4g}]; "
        "||G_n||_1 / d_n: "
        + ", ".join(f"{value:.3e}" for _, value in report.schatten_trend)
    )
    return table


def catalog_table(entries: Iterable[tuple[str, str]]) -> Table:
    """Experiment identifiers with their one-line descriptions."""
    table = Table(title="experiments")
    table.add_column("id")
    table.add_column("description")
    for experiment_id, description in entries:
        table.add_row(experiment_id, description)
    return table


def cross_check_table(experiment_id: str, check: CrossCheck) -> Table:
    table = Table(title=f"{experiment_id}: geometric mean vs (A B^2 A)^1/4 at n = {check.n}")
    table.add_column("comparison")
    table.add_column("sup quantile distance", justify="right")
    table.add_row("geometric vs alternative", f"{check.sup_between_means:.4e}")
    table.add_row("geometric vs symbol", f"{check.sup_geometric_to_symbol:.4e}")
    table.add_row("alternative vs symbol", f"{check.sup_alternative_to_symbol:.4e}")
    return table


def print_tables(tables: Iterable[Table], console: Console | None = None) -> None:
    console = console or Console()
    for table in tables:
        console.print(table)
