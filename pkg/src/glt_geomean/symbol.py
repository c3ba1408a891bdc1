"""
Matrix-valued symbols on [0, 1]^d x [-pi, pi]^d.

Sampling on midpoint grids, the candidate symbol (pointwise limit of the
geometric mean of eps-regularized symbol values), non-decreasing
rearrangements into quantile curves, and the measure of the zero set.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, RejectedInputError, SymbolEvaluationError
from .matfun import geometric_mean
from .types import NEGATIVE_CLAMP, HermitianMatrix, QuantileCurve

logger = logging.getLogger(__name__)

DEFAULT_GRID = (40, 50)
DEFAULT_TOL = 1e-8
EPSILON_SCHEDULE = tuple(10.0**-k for k in range(1, 13))
# Singular values below RANK_CUTOFF * largest count as zero.
RANK_CUTOFF = 1e-8

# Iterates behave like L + c1 eps^{1/2} + c2 eps + ...; consecutive schedule
# entries differ by a factor 10 in eps, so sqrt(10) in eps^{1/2}.
_STEP_RATIO = math.sqrt(10.0)
# Gap increases tolerated past the smallest gap before roundoff is assumed.
_NOISE_PATIENCE = 2

Point = tuple[float, ...]


@dataclass(frozen=True)
class SymbolFunction:
    """
    Evaluable symbol ``(x, theta) -> r x r`` Hermitian PSD matrix.

    Attributes:
        levels: Number of levels d
        block_size: Block size r
        func: Callable taking x and theta as length-d float arrays
        name: Label used in logs and reports
    """

    levels: int
    block_size: int
    func: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(compare=False)
    name: str = ""

    def __call__(self, x: float | Point | np.ndarray, theta: float | Point | np.ndarray) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        ts = np.atleast_1d(np.asarray(theta, dtype=np.float64))
        if xs.shape != (self.levels,) or ts.shape != (self.levels,):
            raise RejectedInputError(f"symbol '{self.name}' expects {self.levels} coordinate(s)")
        value = np.asarray(self.func(xs, ts))
        value = value.reshape(self.block_size, self.block_size)
        return 0.5 * (value + value.conj().T)


def constant_symbol(value: np.ndarray | float, levels: int = 1, name: str = "") -> SymbolFunction:
    """Symbol equal to the same matrix everywhere."""
    block = np.atleast_2d(np.asarray(value))
    return SymbolFunction(levels, block.shape[0], lambda x, theta: block, name=name or "constant")


def zero_symbol(block_size: int = 1, levels: int = 1) -> SymbolFunction:
    """The identically zero r x r symbol."""
    return constant_symbol(np.zeros((block_size, block_size)), levels=levels, name="zero")


def grid_nodes(levels: int, mx: int, mtheta: int) -> Iterator[tuple[Point, Point]]:
    """
    Midpoint grid nodes in lexicographic order.

    ``x_j = (j - 1/2) / mx`` and ``theta_i = -pi + (i - 1/2) * 2 pi / mtheta``
    on every level; x varies slowest.
    """
    xs = [(j - 0.5) / mx for j in range(1, mx + 1)]
    thetas = [-math.pi + (i - 0.5) * 2 * math.pi / mtheta for i in range(1, mtheta + 1)]
    for x in itertools.product(xs, repeat=levels):
        for theta in itertools.product(thetas, repeat=levels):
            yield x, theta


def _node_eigenvalues(sym: SymbolFunction, node: tuple[Point, Point]) -> np.ndarray:
    x, theta = node
    try:
        return scipy.linalg.eigvalsh(sym(x, theta))
    except SymbolEvaluationError:
        raise
    except Exception as err:
        raise SymbolEvaluationError(f"symbol '{sym.name}' failed: {err}", x, theta) from err


def sample_eigenvalues(
    sym: SymbolFunction, mx: int, mtheta: int, workers: int | None = None
) -> np.ndarray:
    """
    Eigenvalues of the symbol at every grid node, concatenated in node order.

    Raises:
        RejectedInputError: If a grid size is below 1
        SymbolEvaluationError: If the symbol fails at a node
    """
    if mx < 1 or mtheta < 1:
        raise RejectedInputError(f"grid sizes must be >= 1, got ({mx}, {mtheta})")
    nodes = list(grid_nodes(sym.levels, mx, mtheta))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda node: _node_eigenvalues(sym, node), nodes))
    else:
        parts = [_node_eigenvalues(sym, node) for node in nodes]
    return np.concatenate(parts)


def rearranged_quantile(
    sym: SymbolFunction, mx: int = DEFAULT_GRID[0], mtheta: int = DEFAULT_GRID[1],
    workers: int | None = None,
) -> QuantileCurve:
    """
    Non-decreasing rearrangement of the symbol's sampled eigenvalues.

    Negative values down to ``NEGATIVE_CLAMP`` are roundoff and become 0.

    Returns:
        A curve of length ``r * mx^d * mtheta^d``
    """
    values = sample_eigenvalues(sym, mx, mtheta, workers)
    values = np.where((values < 0) & (values >= NEGATIVE_CLAMP), 0.0, values)
    return QuantileCurve(np.sort(values, kind="stable"))


def zero_measure(
    sym: SymbolFunction, threshold: float, mx: int = DEFAULT_GRID[0],
    mtheta: int = DEFAULT_GRID[1], workers: int | None = None,
) -> float:
    """Fraction of (grid node, eigenvalue index) pairs whose eigenvalue is <= threshold."""
    if threshold < 0:
        raise RejectedInputError(f"threshold must be >= 0, got {threshold}")
    return rearranged_quantile(sym, mx, mtheta, workers).fraction_at_or_below(threshold)


def range_basis(matrix: np.ndarray, cutoff: float = RANK_CUTOFF) -> np.ndarray:
    """Orthonormal basis of the numerical range (column space) of a Hermitian PSD matrix."""
    values, vectors = scipy.linalg.eigh(matrix)
    largest = float(np.max(np.abs(values))) if values.size else 0.0
    if largest == 0.0:
        return vectors[:, :0]
    return vectors[:, values > cutoff * largest]


def range_intersection(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the intersection of two column spaces given by orthonormal bases."""
    if first.shape[1] == 0 or second.shape[1] == 0:
        return first[:, :0]
    kernel = scipy.linalg.null_space(np.hstack([first, -second]), rcond=RANK_CUTOFF)
    if kernel.shape[1] == 0:
        return first[:, :0]
    return scipy.linalg.orth(first @ kernel[: first.shape[1]], rcond=RANK_CUTOFF)


def _psd_part(matrix: np.ndarray) -> np.ndarray:
    values, vectors = scipy.linalg.eigh(0.5 * (matrix + matrix.conj().T))
    values = np.maximum(values, 0.0)
    result = (vectors * values) @ vectors.conj().T
    return 0.5 * (result + result.conj().T)


def _as_psd_block(value: np.ndarray, label: str) -> np.ndarray:
    block = np.atleast_2d(np.asarray(value))
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise RejectedInputError(f"{label} must be a square matrix, got shape {block.shape}")
    if not np.all(np.isfinite(block)):
        raise RejectedInputError(f"{label} has non-finite entries")
    block = 0.5 * (block + block.conj().T)
    values = scipy.linalg.eigvalsh(block)
    scale = max(1.0, float(np.max(np.abs(values))))
    if values[0] < NEGATIVE_CLAMP * scale:
        raise RejectedInputError(f"{label} is not positive semidefinite (eigenvalue {values[0]:.3e})")
    return block


def candidate_point(kappa: np.ndarray, xi: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Limit of ``G(kappa + eps I, xi + eps I)`` as eps -> 0.

    Two blocks of full numerical rank give ``geometric_mean(kappa, xi)``
    directly. Otherwise the iterates follow ``EPSILON_SCHEDULE``, scaled by
    ``s = max(1, ||kappa||_2, ||xi||_2)``, and are compressed onto the
    intersection of the ranges of kappa and xi, which contains the range of
    the limit; a trivial intersection gives the zero matrix without iterating.
    Two Richardson steps in eps^{1/2} remove the eps^{1/2} and eps terms, and
    the schedule stops once two accelerated values differ by less than
    ``tol * s`` in Frobenius norm.

    When the gaps start growing again the iterates have reached roundoff;
    the estimate with the smallest gap is then accepted if that gap is below
    ``sqrt(tol) * s``.

    Args:
        kappa: Hermitian PSD r x r matrix
        xi: Hermitian PSD r x r matrix
        tol: Relative Cauchy tolerance on the accelerated iterates

    Returns:
        The Hermitian PSD limit

    Raises:
        RejectedInputError: If the inputs are not PSD or differ in size
        ConvergenceError: If neither test is met; carries the smallest gap
    """
    kappa = _as_psd_block(kappa, "kappa")
    xi = _as_psd_block(xi, "xi")
    if kappa.shape != xi.shape:
        raise RejectedInputError(f"size mismatch: {kappa.shape} vs {xi.shape}")
    size = kappa.shape[0]
    kappa_range = range_basis(kappa)
    xi_range = range_basis(xi)
    if kappa_range.shape[1] == size and xi_range.shape[1] == size:
        return geometric_mean(HermitianMatrix(kappa), HermitianMatrix(xi)).entries
    basis = range_intersection(kappa_range, xi_range)
    if basis.shape[1] == 0:
        return np.zeros_like(kappa, dtype=np.result_type(kappa, xi, np.float64))
    projector = None if basis.shape[1] == size else basis @ basis.conj().T

    # Shifts are relative to the larger spectral norm so the regularized inputs
    # stay above the eigenvalue floor of the geometric mean.
    scale = max(1.0, float(np.linalg.norm(kappa, 2)), float(np.linalg.norm(xi, 2)))
    identity = scale * np.eye(size)
    ratio_sq = _STEP_RATIO * _STEP_RATIO
    previous_mean: np.ndarray | None = None
    previous_first: np.ndarray | None = None
    previous_second: np.ndarray | None = None
    best_gap = math.inf
    best_estimate: np.ndarray | None = None
    since_best = 0
    for eps in EPSILON_SCHEDULE:
        mean = geometric_mean(
            HermitianMatrix(kappa + eps * identity), HermitianMatrix(xi + eps * identity)
        ).entries
        if projector is not None:
            mean = projector @ mean @ projector
        first = second = None
        if previous_mean is not None:
            first = (_STEP_RATIO * mean - previous_mean) / (_STEP_RATIO - 1.0)
        if first is not None and previous_first is not None:
            second = (ratio_sq * first - previous_first) / (ratio_sq - 1.0)
        if second is not None and previous_second is not None:
            gap = float(np.linalg.norm(second - previous_second, "fro"))
            logger.debug(f"candidate eps={eps:.0e} gap={gap:.3e}")
            if gap < tol * scale:
                return _psd_part(second)
            if gap < best_gap:
                best_gap, best_estimate, since_best = gap, second, 0
            else:
                since_best += 1
                if since_best >= _NOISE_PATIENCE:
                    break
        previous_mean, previous_first, previous_second = mean, first, second

    if best_estimate is not None and best_gap < math.sqrt(tol) * scale:
        logger.debug(f"candidate accepted at the roundoff floor, gap={best_gap:.3e}")
        return _psd_part(best_estimate)
    raise ConvergenceError(
        f"candidate symbol did not converge: smallest gap {best_gap:.3e} "
        f"against tol {tol:.1e} * {scale:.3g}",
        gap=best_gap,
    )


def candidate_symbol(
    kappa: SymbolFunction, xi: SymbolFunction, tol: float = DEFAULT_TOL, name: str = ""
) -> SymbolFunction:
    """Pointwise candidate symbol of two symbols with equal levels and block size."""
    if (kappa.levels, kappa.block_size) != (xi.levels, xi.block_size):
        raise RejectedInputError(
            f"symbols differ in shape: d={kappa.levels}, r={kappa.block_size} vs "
            f"d={xi.levels}, r={xi.block_size}"
        )

    def evaluate(x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return candidate_point(kappa(x, theta), xi(x, theta), tol)

    label = name or f"candidate({kappa.name}, {xi.name})"
    return SymbolFunction(kappa.levels, kappa.block_size, evaluate, name=label)
