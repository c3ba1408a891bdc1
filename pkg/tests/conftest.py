"""Pytest configuration and fixtures."""

from __future__ import annotations

import sys
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from glt_geomean.experiments import get_spec, run_experiment
from glt_geomean.types import ExperimentReport, HermitianMatrix

RandomHPD = Callable[..., HermitianMatrix]


@pytest.fixture(autouse=True, scope="session")
def protect_repository_files():
    """
    Automatically protect repository files from test modifications.

    The CLI reads its run defaults from pyproject.toml; this fixture backs it up
    (and README.md) at the start of the session and restores them at the end.
    """
    repo_root = Path(__file__).parent.parent
    backups = {
        path: path.read_bytes()
        for path in (repo_root / "pyproject.toml", repo_root / "README.md")
        if path.exists()
    }

    yield

    for path, content in backups.items():
        try:
            if not path.exists() or path.read_bytes() != content:
                path.write_bytes(content)
                print(f"Warning: Restored modified {path.name} after test session", file=sys.stderr)
        except OSError as e:
            print(f"Warning: Could not restore {path.name}: {e}", file=sys.stderr)


def make_hpd(
    rng: np.random.Generator, size: int, *, complex_valued: bool = False, cond: float = 1e3
) -> HermitianMatrix:
    """Random HPD matrix with eigenvalues log-spaced in [1, cond]."""
    raw = rng.standard_normal((size, size))
    if complex_valued:
        raw = raw + 1j * rng.standard_normal((size, size))
    basis, _ = np.linalg.qr(raw)
    eigenvalues = np.logspace(0, np.log10(cond), size)
    rng.shuffle(eigenvalues)
    return HermitianMatrix((basis * eigenvalues) @ basis.conj().T)


@pytest.fixture(scope="session")
def random_hpd() -> RandomHPD:
    """Factory fixture: ``random_hpd(seed, size, complex_valued=False, cond=1e3)``."""

    def factory(seed: int, size: int, **kwargs: object) -> HermitianMatrix:
        return make_hpd(np.random.default_rng(seed), size, **kwargs)  # type: ignore[arg-type]

    return factory


class CatalogRuns:
    """Session-wide cache of catalog experiment reports at the default n values."""

    def __init__(self) -> None:
        self._reports: dict[str, ExperimentReport] = {}

    def __call__(self, experiment_id: str) -> ExperimentReport:
        if experiment_id not in self._reports:
            self._reports[experiment_id] = run_experiment(get_spec(experiment_id), workers=2)
        return self._reports[experiment_id]


@pytest.fixture(scope="session")
def catalog_run() -> CatalogRuns:
    return CatalogRuns()
