"""
Type definitions for the package.

This module contains the core data structures shared by the matrix-function
kernel, the spectral statistics and the experiment harness: Hermitian
matrices, eigendecompositions, sorted spectra, symbol quantile curves and
experiment reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import RejectedInputError

# Tiny negative eigenvalues of PSD symbols above this value are roundoff.
NEGATIVE_CLAMP = -1e-10


@dataclass
class HermitianMatrix:
    """
    Dense Hermitian matrix with an optional positive-definiteness certificate.

    The entries are symmetrized at construction, ``(M + M*) / 2``, so the
    stored array is Hermitian to working precision whatever roundoff the
    producer left behind. Real input stays real (float64); complex input is
    stored as complex128. The stored array is read-only, which makes instances
    safe to share across threads.

    Attributes:
        entries: Square array of shape (size, size)
        hpd_certified: True once a positive-definiteness check succeeded
            (see ``matfun.certify_hpd``)
    """

    entries: np.ndarray
    hpd_certified: bool = False

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise RejectedInputError(f"expected a non-empty square matrix, got shape {arr.shape}")
        dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
        arr = arr.astype(dtype, copy=False)
        sym = 0.5 * (arr + arr.conj().T)
        sym.setflags(write=False)
        self.entries = sym

    @property
    def size(self) -> int:
        """Number of rows (and columns)."""
        return int(self.entries.shape[0])

    @classmethod
    def identity(cls, size: int) -> HermitianMatrix:
        """Return the certified identity of the given size."""
        return cls(np.eye(size), hpd_certified=True)

    @classmethod
    def diagonal(cls, values: np.ndarray | list[float]) -> HermitianMatrix:
        """Return the diagonal matrix with the given real entries (not certified)."""
        return cls(np.diag(np.asarray(values, dtype=np.float64)))


@dataclass
class EigDecomposition:
    """
    Eigendecomposition ``M = V diag(eigenvalues) V*`` of a Hermitian matrix.

    Attributes:
        eigenvalues: Real eigenvalues in non-decreasing order
        eigenvectors: Matrix whose column i is a unit eigenvector for eigenvalue i
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass
class SpectrumSample:
    """
    Sorted spectrum of one matrix of a sequence, with provenance.

    Attributes:
        values: Eigenvalues in non-decreasing order
        n: Sequence parameter the matrix was built for
        d_n: Matrix size; always equals ``len(values)``
        experiment_id: Identifier of the producing experiment ("" when ad hoc)
    """

    values: np.ndarray
    n: int
    d_n: int
    experiment_id: str = ""

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or len(self.values) != self.d_n:
            raise RejectedInputError(
                f"spectrum of length {self.values.size} does not match d_n={self.d_n}"
            )
        if self.d_n and np.any(np.diff(self.values) < 0):
            raise RejectedInputError("spectrum values must be in non-decreasing order")


@dataclass
class QuantileCurve:
    """
    Non-decreasing rearrangement of a sampled symbol.

    Sample i (0-based) is the value of the quantile function at
    ``t_i = (i + 1/2) / N`` where N is the number of samples.

    Attributes:
        samples: Non-decreasing, finite values, each >= 0 after clamping
    """

    samples: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.samples, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise RejectedInputError("a quantile curve needs at least one sample")
        if not np.all(np.isfinite(values)):
            raise RejectedInputError("quantile curve samples must be finite")
        if values.min() < NEGATIVE_CLAMP:
            raise RejectedInputError(
                f"quantile curve sample {values.min():.3e} is below {NEGATIVE_CLAMP}"
            )
        if np.any(np.diff(values) < 0):
            raise RejectedInputError("quantile curve samples must be non-decreasing")
        self.samples = values

    @property
    def t(self) -> np.ndarray:
        """Abscissae ``(i - 1/2) / N`` of the samples."""
        count = self.samples.size
        return (np.arange(1, count + 1) - 0.5) / count

    def fraction_at_or_below(self, threshold: float) -> float:
        """Fraction of samples that do not exceed ``threshold``."""
        return float(np.count_nonzero(self.samples <= threshold)) / self.samples.size


@dataclass
class ExtremalStats:
    """
    Extremal eigenvalues of an HPD matrix.

    Attributes:
        lambda_min: Smallest eigenvalue (> 0)
        lambda_max: Largest eigenvalue
        cond2: Spectral condition number ``lambda_max / lambda_min``
    """

    lambda_min: float
    lambda_max: float
    cond2: float


@dataclass
class ReportRow:
    """One row of an experiment report, for a single sequence parameter n."""

    n: int
    d_n: int
    lambda_min: float
    lambda_max: float
    cond2: float
    zero_fraction: float
    sup_dist: float
    mean_abs_dist: float


@dataclass
class ExperimentReport:
    """
    Everything an experiment run produced.

    Attributes:
        experiment_id: Identifier of the experiment
        description: One-line description of the construction
        rows: Per-n rows ordered by n
        alphas: Decay exponents of the lambda_min column
        target_zero_measure: Measure of the symbol's zero set the zero
            fractions should approach
        symbol_min: Essential infimum of the sampled expected symbol
        symbol_max: Essential supremum of the sampled expected symbol
        schatten_trend: ``(n, ||G_n||_1 / d_n)`` pairs, the zero-distribution
            diagnostic of the computed means
        artifacts: Paths of every file written for this report
    """

    experiment_id: str
    description: str
    rows: list[ReportRow]
    alphas: list[float]
    target_zero_measure: float
    symbol_min: float
    symbol_max: float
    schatten_trend: list[tuple[int, float]] = field(default_factory=list)
    artifacts: list[Path] = field(default_factory=list)

    @property
    def target_errors(self) -> list[float]:
        """Absolute gap between each row's zero fraction and the target measure."""
        return [abs(row.zero_fraction - self.target_zero_measure) for row in self.rows]


@dataclass
class CrossCheck:
    """
    Distributional comparison of the geometric mean and the alternative mean.

    Attributes:
        n: Sequence parameter
        sup_between_means: Sup quantile distance between the two sorted spectra
        sup_geometric_to_symbol: Sup quantile distance of the geometric mean to the symbol
        sup_alternative_to_symbol: Sup quantile distance of the alternative mean to the symbol
    """

    n: int
    sup_between_means: float
    sup_geometric_to_symbol: float
    sup_alternative_to_symbol: float


@dataclass
class RunConfig:
    """
    Parsed command line of ``glt-geomean``.

    Attributes:
        command: "list" or "run"
        experiment_ids: Catalog identifiers to run ("all" already expanded)
        config_path: JSON file with user-defined experiments, if any
        n_list: Sequence parameters, strictly increasing, each >= 2
        out_dir: Directory receiving the CSV and SVG artifacts
        grid: Symbol sampling grid (Mx, Mtheta)
        threshold: Zero-cluster threshold
        tol: Convergence tolerance of numerically computed candidate symbols
        svg: Render quantile overlays
        threads: Worker threads for the n values and symbol sampling
        cross_check: Compare the geometric mean with the alternative mean at this n
        verbosity: -1 for warnings only, 0 for info, 1 for debug logging
    """

    command: str
    experiment_ids: list[str] = field(default_factory=list)
    config_path: Path | None = None
    n_list: tuple[int, ...] = (40, 80, 160, 320)
    out_dir: Path = Path("results")
    grid: tuple[int, int] = (40, 50)
    threshold: float = 0.1
    tol: float = 1e-8
    svg: bool = False
    threads: int = 1
    cross_check: int | None = None
    verbosity: int = 0
