"""
Spectral statistics of computed matrices.

Sorted spectra, their distance to a symbol's quantile curve, extremal
eigenvalues, minimal-eigenvalue decay exponents, zero-cluster fractions and
the normalized Schatten diagnostic of zero-distributed sequences.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence

import numpy as np

from .errors import RejectedInputError
from .matfun import hermitian_eig, schatten_of_values
from .types import ExtremalStats, HermitianMatrix, QuantileCurve, SpectrumSample

logger = logging.getLogger(__name__)

# Eigenvalues at or below this value count as clustered at zero.
ZERO_THRESHOLD = 0.1


def spectrum_of(matrix: HermitianMatrix, n: int = 0, experiment_id: str = "") -> SpectrumSample:
    """Ascending eigenvalues of ``matrix`` tagged with the sequence parameter."""
    values = hermitian_eig(matrix).eigenvalues
    return SpectrumSample(values=values, n=n, d_n=matrix.size, experiment_id=experiment_id)


def quantile_distance(sample: SpectrumSample, curve: QuantileCurve) -> tuple[float, float]:
    """
    Distance between a sorted spectrum and a symbol's quantile curve.

    The curve is interpolated linearly at the spectrum's own abscissae
    ``t_i = (i - 1/2) / d_n``; outside the curve's sample range its end values
    are held.

    Returns:
        ``(sup_dist, mean_abs_dist)`` over all i
    """
    if sample.d_n == 0:
        raise RejectedInputError("spectrum is empty")
    t = (np.arange(1, sample.d_n + 1) - 0.5) / sample.d_n
    reference = np.interp(t, curve.t, curve.samples)
    gaps = np.abs(sample.values - reference)
    return float(gaps.max()), float(gaps.mean())


def spectrum_distance(first: SpectrumSample, second: SpectrumSample) -> float:
    """Sup quantile distance between two sorted spectra of possibly different lengths."""
    return quantile_distance(first, QuantileCurve(np.maximum(second.values, 0.0)))[0]


def extremal_stats(sample: SpectrumSample) -> ExtremalStats:
    """
    ``(lambda_min, lambda_max, cond2)`` of an HPD spectrum.

    Raises:
        RejectedInputError: If the spectrum is empty or ``lambda_min <= 0``
    """
    if sample.d_n == 0:
        raise RejectedInputError("spectrum is empty")
    lowest = float(sample.values[0])
    highest = float(sample.values[-1])
    if lowest <= 0:
        raise RejectedInputError(
            f"lambda_min = {lowest:.6e} is not positive; the matrix lost definiteness"
        )
    return ExtremalStats(lambda_min=lowest, lambda_max=highest, cond2=highest / lowest)


def decay_exponents(taus: Sequence[float]) -> list[float]:
    """
    Exponents ``alpha_j = log2(tau_j / tau_{j+1})`` of a sequence measured at doubling n.

    Raises:
        RejectedInputError: If any entry is not positive
    """
    values = [float(t) for t in taus]
    if any(not v > 0 for v in values):
        raise RejectedInputError(f"decay exponents need positive values, got {values}")
    return [math.log2(a / b) for a, b in zip(values, values[1:])]


def zero_fraction(sample: SpectrumSample, threshold: float = ZERO_THRESHOLD) -> float:
    """Fraction of eigenvalues that do not exceed ``threshold``."""
    if threshold < 0:
        raise RejectedInputError(f"threshold must be >= 0, got {threshold}")
    if sample.d_n == 0:
        return 0.0
    return float(np.count_nonzero(sample.values <= threshold)) / sample.d_n


def zero_distribution_diagnostic(
    series: Sequence[SpectrumSample], p: float = 1.0
) -> list[tuple[int, float]]:
    """
    Normalized Schatten norms ``||A_n||_p / d_n^{1/p}`` along a sequence.

    A trend towards 0 indicates a zero-distributed sequence. For Hermitian
    matrices the singular values are the absolute eigenvalues, so the
    spectra alone suffice.

    Raises:
        RejectedInputError: If the series is empty or p < 1
    """
    if not series:
        raise RejectedInputError("zero-distribution diagnostic needs at least one spectrum")
    trend: list[tuple[int, float]] = []
    for sample in series:
        norm = schatten_of_values(np.abs(sample.values), p)
        scale = 1.0 if math.isinf(p) else sample.d_n ** (1.0 / p)
        trend.append((sample.n, norm / scale))
    logger.debug(f"schatten-{p} trend: {trend}")
    return trend
