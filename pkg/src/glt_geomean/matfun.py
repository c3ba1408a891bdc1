"""
Dense Hermitian matrix functions.

Eigendecomposition, functional calculus, the geometric mean of two HPD
matrices, the inversion-free alternative mean ``(A B^2 A)^{1/4}`` and
Schatten norms. Everything is evaluated through ``scipy.linalg`` on dense
arrays; all functions are pure and thread-safe.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from typing import Literal

import numpy as np
import scipy.linalg

from .errors import NotHPDError, RejectedInputError
from .types import EigDecomposition, HermitianMatrix

logger = logging.getLogger(__name__)

# Relative eigenvalue floor: lambda_min must exceed HPD_FLOOR * lambda_max
# before a negative power is taken.
HPD_FLOOR = 1e-14
# Relative floor for the spectrum of A^{-1/2} B A^{-1/2} inside the geometric mean.
INNER_FLOOR = float(np.finfo(np.float64).eps)

Domain = Literal["positive", "nonnegative", "real"]


def hermitian_eig(matrix: HermitianMatrix) -> EigDecomposition:
    """
    Eigendecomposition of a Hermitian matrix.

    Args:
        matrix: Matrix to decompose

    Returns:
        Ascending eigenvalues and the matching orthonormal eigenvectors

    Raises:
        RejectedInputError: If the matrix has non-finite entries
    """
    if not np.all(np.isfinite(matrix.entries)):
        raise RejectedInputError("matrix has non-finite entries")
    eigenvalues, eigenvectors = scipy.linalg.eigh(matrix.entries)
    return EigDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def certify_hpd(matrix: HermitianMatrix) -> HermitianMatrix:
    """
    Certify that a matrix is Hermitian positive definite.

    The check is a Cholesky factorization, which succeeds for graded matrices
    whose smallest eigenvalue is far below the eigenvalue floor.

    Args:
        matrix: Matrix to certify

    Returns:
        The same entries with ``hpd_certified`` set

    Raises:
        NotHPDError: If the factorization fails; carries the smallest eigenvalue
    """
    if matrix.hpd_certified:
        return matrix
    try:
        scipy.linalg.cholesky(matrix.entries, lower=True)
    except (np.linalg.LinAlgError, ValueError) as err:
        smallest = None
        if np.all(np.isfinite(matrix.entries)):
            smallest = float(scipy.linalg.eigvalsh(matrix.entries)[0])
        raise NotHPDError(
            f"matrix of size {matrix.size} is not positive definite "
            f"(smallest eigenvalue {smallest})",
            eigenvalue=smallest,
        ) from err
    return HermitianMatrix(matrix.entries, hpd_certified=True)


def _admissible(eigenvalues: np.ndarray, domain: Domain) -> np.ndarray:
    if domain == "real":
        return eigenvalues
    largest = float(np.max(np.abs(eigenvalues)))
    smallest = float(eigenvalues[0])
    if domain == "positive":
        if largest == 0.0 or smallest <= HPD_FLOOR * largest:
            raise NotHPDError(
                f"eigenvalue {smallest:.6e} is below the floor {HPD_FLOOR:g} * {largest:.6e}",
                eigenvalue=smallest,
            )
        return eigenvalues
    if smallest < -HPD_FLOOR * largest:
        raise NotHPDError(
            f"eigenvalue {smallest:.6e} is negative beyond roundoff", eigenvalue=smallest
        )
    return np.maximum(eigenvalues, 0.0)


def _reassemble(eigenvectors: np.ndarray, values: np.ndarray) -> HermitianMatrix:
    result = HermitianMatrix((eigenvectors * values) @ eigenvectors.conj().T)
    if values.size and values.max() > 0 and values.min() > HPD_FLOOR * values.max():
        result.hpd_certified = True
    return result


def hpd_function(
    matrix: HermitianMatrix,
    func: Callable[[np.ndarray], np.ndarray],
    *,
    domain: Domain = "positive",
) -> HermitianMatrix:
    """
    Apply a scalar function through the eigendecomposition, ``V f(L) V*``.

    ``func`` receives the whole eigenvalue vector and must act elementwise
    (numpy ufuncs such as ``np.sqrt`` qualify).

    Args:
        matrix: Hermitian argument
        func: Elementwise real function
        domain: "positive" enforces ``lambda_min > HPD_FLOOR * lambda_max``
            (negative powers, logarithms); "nonnegative" accepts PSD input
            and clamps roundoff-level negatives to zero (roots); "real" applies
            ``func`` to the raw spectrum

    Returns:
        The Hermitian matrix ``func(matrix)``

    Raises:
        NotHPDError: If the spectrum is outside the requested domain
        RejectedInputError: If the matrix is not finite or ``func`` returns a
            wrongly shaped or non-finite result
    """
    decomposition = hermitian_eig(matrix)
    eigenvalues = _admissible(decomposition.eigenvalues, domain)
    mapped = np.asarray(func(eigenvalues), dtype=np.float64)
    if mapped.shape != eigenvalues.shape or not np.all(np.isfinite(mapped)):
        raise RejectedInputError("function must map the eigenvalues elementwise to finite reals")
    return _reassemble(decomposition.eigenvectors, mapped)


def fractional_power(matrix: HermitianMatrix, exponent: float) -> HermitianMatrix:
    """
    Real power of a Hermitian matrix.

    Negative exponents require an HPD argument above the floor; non-negative
    exponents accept PSD arguments.
    """
    domain: Domain = "positive" if exponent < 0 else "nonnegative"
    return hpd_function(matrix, lambda w: np.power(w, exponent), domain=domain)


def _check_pair(a: HermitianMatrix, b: HermitianMatrix) -> tuple[HermitianMatrix, HermitianMatrix]:
    if a.size != b.size:
        raise RejectedInputError(f"size mismatch: {a.size} vs {b.size}")
    return certify_hpd(a), certify_hpd(b)


def geometric_mean(a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    """
    Geometric mean ``A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}``.

    The mean is assembled in Gram form ``K K*`` with ``K = A^{1/2} W L^{1/4}``,
    where ``A^{-1/2} B A^{-1/2} = W L W*``, so the result is positive
    semidefinite by construction.

    Args:
        a: HPD matrix (certified on entry if not already)
        b: HPD matrix of the same size

    Returns:
        The certified HPD geometric mean

    Raises:
        RejectedInputError: On size mismatch
        NotHPDError: If either input fails certification, A is below the
            eigenvalue floor, or the mean lost definiteness to roundoff
    """
    a, b = _check_pair(a, b)
    outer = hermitian_eig(a)
    scale = np.sqrt(_admissible(outer.eigenvalues, "positive"))
    basis = outer.eigenvectors
    a_half = (basis * scale) @ basis.conj().T
    a_inv_half = (basis / scale) @ basis.conj().T

    inner = hermitian_eig(HermitianMatrix(a_inv_half @ b.entries @ a_inv_half))
    # The inner matrix is congruent to the certified B, so eigenvalues at or
    # below its roundoff level are raised to that level instead of dropped.
    inner_values = np.maximum(inner.eigenvalues, INNER_FLOOR * float(np.max(inner.eigenvalues)))
    factor = (a_half @ inner.eigenvectors) * np.sqrt(np.sqrt(inner_values))
    return certify_hpd(HermitianMatrix(factor @ factor.conj().T))


def alt_mean(a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    """
    Inversion-free mean ``(A B^2 A)^{1/4}``.

    Evaluated from the singular value decomposition ``AB = U S V*`` as
    ``U S^{1/2} U*``, which never squares the condition number of ``AB``.
    Equals ``geometric_mean(a, b)`` when A and B commute.

    Raises:
        RejectedInputError: On size mismatch
        NotHPDError: If either input fails certification
    """
    a, b = _check_pair(a, b)
    left, singular, _ = scipy.linalg.svd(a.entries @ b.entries)
    return certify_hpd(_reassemble(left, np.sqrt(singular)))


def schatten_norm(matrix: HermitianMatrix, p: float) -> float:
    """
    Schatten p-norm: the l^p norm of the singular values.

    For Hermitian matrices the singular values are the absolute eigenvalues.
    ``p = math.inf`` gives the spectral norm, 1 the trace norm, 2 the
    Frobenius norm.

    Raises:
        RejectedInputError: If p < 1 or the matrix is not finite
    """
    if not p >= 1:
        raise RejectedInputError(f"Schatten exponent must be >= 1, got {p}")
    if not np.all(np.isfinite(matrix.entries)):
        raise RejectedInputError("matrix has non-finite entries")
    singular = np.abs(scipy.linalg.eigvalsh(matrix.entries))
    return schatten_of_values(singular, p)


def schatten_of_values(singular: np.ndarray, p: float) -> float:
    """l^p norm of a singular-value (or absolute eigenvalue) vector."""
    if not p >= 1:
        raise RejectedInputError(f"Schatten exponent must be >= 1, got {p}")
    values = np.abs(np.asarray(singular, dtype=np.float64))
    if values.size == 0:
        return 0.0
    if math.isinf(p):
        return float(values.max())
    return float(np.linalg.norm(values, ord=p))
