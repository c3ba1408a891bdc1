"""
Generating functions and their Fourier coefficients.

A generating function f on [-pi, pi]^d determines the Toeplitz matrices
T_n(f) through its coefficients

    f_k = (2 pi)^{-d} * integral of f(theta) exp(-i <k, theta>) dtheta.

The closed-form catalog (constants, trigonometric polynomials, the
indicator of [-a, a], the ramp and its reflection, separable products) is
exact and backs every built-in experiment. ``QuadratureFunction`` wraps an
arbitrary vectorized callable and integrates it with composite
Gauss-Legendre panels split at the declared breakpoints.

Matrix-valued generating functions of the form f(theta) * A are represented
by a ``CoefficientProvider``: a scalar generating function paired with a
constant r x r block.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Literal

import numpy as np

from .errors import CoefficientError

MultiIndex = tuple[int, ...]
Block = tuple[tuple[complex, ...], ...]

# Gauss-Legendre nodes per quadrature panel.
PANEL_ORDER = 16


def as_index(k: int | Iterable[int], levels: int) -> MultiIndex:
    """Normalize an int or an iterable of ints to a multi-index of the given length."""
    index = (int(k),) if isinstance(k, (int, np.integer)) else tuple(int(v) for v in k)
    if len(index) != levels:
        raise CoefficientError(f"multi-index {index} does not have {levels} level(s)")
    return index


def _theta_columns(theta: np.ndarray, levels: int) -> np.ndarray:
    arr = np.asarray(theta, dtype=np.float64)
    if levels == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., np.newaxis]
    if arr.shape[-1] != levels:
        raise CoefficientError(f"expected theta with {levels} trailing component(s)")
    return arr


class GeneratingFunction(ABC):
    """Scalar function on [-pi, pi]^d with computable Fourier coefficients."""

    kind: Literal["closed-form", "quadrature"] = "closed-form"

    @property
    @abstractmethod
    def levels(self) -> int:
        """Number of levels d."""

    @abstractmethod
    def coefficient(self, k: MultiIndex) -> complex:
        """Fourier coefficient of index k (already validated)."""

    @abstractmethod
    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        """Values at points of shape (..., d); returns shape (...)."""

    def __call__(self, theta: np.ndarray | float) -> np.ndarray:
        return self.evaluate(_theta_columns(np.asarray(theta), self.levels))

    @property
    def is_real(self) -> bool:
        """True when the function is real-valued, i.e. coefficient(-k) = conj(coefficient(k))."""
        return True


@dataclass(frozen=True)
class Constant(GeneratingFunction):
    """The constant function c on d levels."""

    value: complex
    dims: int = 1

    @property
    def levels(self) -> int:
        return self.dims

    def coefficient(self, k: MultiIndex) -> complex:
        return complex(self.value) if not any(k) else 0j

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        return np.full(theta.shape[:-1], complex(self.value))

    @property
    def is_real(self) -> bool:
        return complex(self.value).imag == 0


@dataclass(frozen=True)
class TrigPolynomial(GeneratingFunction):
    """
    Finite Fourier series ``sum_k c_k exp(i <k, theta>)``.

    Attributes:
        terms: Sorted ``(k, c_k)`` pairs with non-zero coefficients
        dims: Number of levels
    """

    terms: tuple[tuple[MultiIndex, complex], ...]
    dims: int = 1

    @property
    def levels(self) -> int:
        return self.dims

    @cached_property
    def _lookup(self) -> dict[MultiIndex, complex]:
        return dict(self.terms)

    def coefficient(self, k: MultiIndex) -> complex:
        return self._lookup.get(k, 0j)

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        total = np.zeros(theta.shape[:-1], dtype=np.complex128)
        for index, value in self.terms:
            total += value * np.exp(1j * (theta @ np.asarray(index, dtype=np.float64)))
        return total

    @property
    def is_real(self) -> bool:
        lookup = self._lookup
        return all(
            abs(lookup.get(tuple(-v for v in k), 0j) - value.conjugate()) <= 1e-15 * abs(value)
            for k, value in self.terms
        )


def banded(coefficients: Mapping[Any, complex], levels: int = 1) -> TrigPolynomial:
    """
    Trigonometric polynomial from a ``{k: c_k}`` mapping.

    Keys may be ints (one level) or tuples of ints.
    """
    terms: dict[MultiIndex, complex] = {}
    for key, value in coefficients.items():
        index = as_index(key, levels)
        if complex(value) != 0:
            terms[index] = terms.get(index, 0j) + complex(value)
    return TrigPolynomial(terms=tuple(sorted(terms.items())), dims=levels)


def cosine(alpha: float | Fraction, beta: float | Fraction) -> TrigPolynomial:
    """The function ``alpha + beta * cos(theta)``."""
    half = complex(float(beta) / 2)
    return banded({-1: half, 0: complex(float(alpha)), 1: half})


@dataclass(frozen=True)
class Indicator(GeneratingFunction):
    """Characteristic function of the closed interval [-a, a], 0 < a <= pi."""

    half_width: Fraction | float

    def __post_init__(self) -> None:
        if not 0 < float(self.half_width) <= math.pi:
            raise CoefficientError(f"indicator half width must lie in (0, pi], got {self.half_width}")

    @property
    def levels(self) -> int:
        return 1

    def coefficient(self, k: MultiIndex) -> complex:
        a = float(self.half_width)
        (m,) = k
        if m == 0:
            return complex(a / math.pi)
        return complex(math.sin(m * a) / (math.pi * m))

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        return (np.abs(theta[..., 0]) <= float(self.half_width)).astype(np.complex128)


@dataclass(frozen=True)
class Ramp(GeneratingFunction):
    """
    Ramp f with f = 0 on [-pi, 0] and f(theta) = theta on (0, pi].

    With ``reflected`` set, the function is g(theta) = f(-theta).
    """

    reflected: bool = False

    @property
    def levels(self) -> int:
        return 1

    def coefficient(self, k: MultiIndex) -> complex:
        (m,) = k
        if self.reflected:
            m = -m
        if m == 0:
            return complex(math.pi / 4)
        sign = -1.0 if m % 2 else 1.0
        return complex((sign - 1.0) / (2 * math.pi * m * m), sign / (2 * m))

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        t = -theta[..., 0] if self.reflected else theta[..., 0]
        return np.where(t > 0, t, 0.0).astype(np.complex128)


@dataclass(frozen=True)
class Separable(GeneratingFunction):
    """Product ``f_1(theta_1) * ... * f_d(theta_d)`` of one-level functions."""

    factors: tuple[GeneratingFunction, ...]

    def __post_init__(self) -> None:
        if not self.factors or any(f.levels != 1 for f in self.factors):
            raise CoefficientError("separable functions need one-level factors")

    @property
    def levels(self) -> int:
        return len(self.factors)

    @property
    def kind(self) -> Literal["closed-form", "quadrature"]:  # type: ignore[override]
        if any(f.kind == "quadrature" for f in self.factors):
            return "quadrature"
        return "closed-form"

    def coefficient(self, k: MultiIndex) -> complex:
        return math.prod((f.coefficient((m,)) for f, m in zip(self.factors, k, strict=True)), start=1 + 0j)

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        values = np.ones(theta.shape[:-1], dtype=np.complex128)
        for level, factor in enumerate(self.factors):
            values = values * factor.evaluate(theta[..., level : level + 1])
        return values

    @property
    def is_real(self) -> bool:
        return all(f.is_real for f in self.factors)


def _panel_rule(resolution: int, breakpoints: Iterable[float]) -> tuple[np.ndarray, np.ndarray]:
    edges = sorted({-math.pi, math.pi, *(float(b) for b in breakpoints if -math.pi < b < math.pi)})
    order = min(PANEL_ORDER, resolution)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    panels = max(len(edges) - 1, resolution // order)
    theta_parts: list[np.ndarray] = []
    weight_parts: list[np.ndarray] = []
    for lo, hi in itertools.pairwise(edges):
        count = max(1, round(panels * (hi - lo) / (2 * math.pi)))
        cuts = np.linspace(lo, hi, count + 1)
        half = 0.5 * np.diff(cuts)
        mid = 0.5 * (cuts[:-1] + cuts[1:])
        theta_parts.append((mid[:, None] + half[:, None] * nodes[None, :]).ravel())
        weight_parts.append((half[:, None] * weights[None, :]).ravel())
    return np.concatenate(theta_parts), np.concatenate(weight_parts)


@dataclass(frozen=True)
class QuadratureFunction(GeneratingFunction):
    """
    User-supplied generating function integrated numerically.

    The callable receives an array of shape (m, d) and returns m values.
    Every level is integrated with composite Gauss-Legendre panels split at
    ``breakpoints``, with about ``resolution`` nodes per level; jumps and
    kinks of the integrand should be listed as breakpoints.

    Attributes:
        func: Vectorized callable, (m, d) -> (m,)
        dims: Number of levels
        resolution: Quadrature nodes per level
        breakpoints: Discontinuities of f or of its derivative inside (-pi, pi)
        real_valued: Whether f is real-valued
    """

    func: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    dims: int = 1
    resolution: int = 1 << 12
    breakpoints: tuple[float, ...] = ()
    real_valued: bool = True
    kind: Literal["closed-form", "quadrature"] = "quadrature"

    @property
    def levels(self) -> int:
        return self.dims

    @property
    def is_real(self) -> bool:
        return self.real_valued

    @cached_property
    def _samples(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        theta_1d, weights_1d = _panel_rule(self.resolution, self.breakpoints)
        grids = np.meshgrid(*([theta_1d] * self.dims), indexing="ij")
        points = np.stack([g.ravel() for g in grids], axis=-1)
        weights = np.ones(points.shape[0])
        for w in np.meshgrid(*([weights_1d] * self.dims), indexing="ij"):
            weights = weights * w.ravel()
        values = np.asarray(self.func(points), dtype=np.complex128).reshape(points.shape[0])
        return points, weights * values, weights

    def coefficient(self, k: MultiIndex) -> complex:
        needed = 2 * (max(abs(m) for m in k) + 1)
        if self.resolution < needed:
            raise CoefficientError(
                f"quadrature resolution {self.resolution} is below {needed} samples per level "
                f"required for index {k}"
            )
        points, weighted, _ = self._samples
        phase = np.exp(-1j * (points @ np.asarray(k, dtype=np.float64)))
        return complex(np.sum(weighted * phase) / (2 * math.pi) ** self.dims)

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        flat = theta.reshape(-1, self.dims)
        return np.asarray(self.func(flat), dtype=np.complex128).reshape(theta.shape[:-1])


def freeze_block(block: Any) -> Block:
    """Convert an array-like r x r block into a hashable tuple of tuples."""
    arr = np.atleast_2d(np.asarray(block, dtype=np.complex128))
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise CoefficientError(f"block must be square, got shape {arr.shape}")
    return tuple(tuple(complex(v) for v in row) for row in arr)


def block_array(block: Block) -> np.ndarray:
    """Array form of a frozen block; real dtype when every entry is real."""
    arr = np.array(block, dtype=np.complex128)
    return arr.real.copy() if not np.any(arr.imag) else arr


@dataclass(frozen=True)
class CoefficientProvider:
    """
    Matrix-valued generating function ``f(theta) * block``.

    Attributes:
        function: Scalar generating function f
        block: Constant r x r block (1 x 1 identity for scalar symbols)
    """

    function: GeneratingFunction
    block: Block = ((1 + 0j,),)

    @property
    def levels(self) -> int:
        return self.function.levels

    @property
    def block_size(self) -> int:
        return len(self.block)

    @property
    def kind(self) -> Literal["closed-form", "quadrature"]:
        return self.function.kind

    @cached_property
    def block_matrix(self) -> np.ndarray:
        return block_array(self.block)

    def coeff(self, k: int | Iterable[int]) -> np.ndarray:
        """The r x r coefficient block of multi-index k."""
        return self.function.coefficient(as_index(k, self.levels)) * self.block_matrix

    def evaluate(self, theta: np.ndarray | float) -> np.ndarray:
        """Symbol value ``f(theta) * block`` at a single point theta."""
        value = complex(np.asarray(self.function(theta)).reshape(()))
        return value * self.block_matrix

    @property
    def hermitian(self) -> bool:
        """True when ``coeff(-k) = coeff(k)*`` for every k."""
        block = self.block_matrix
        return self.function.is_real and bool(np.allclose(block, block.conj().T, rtol=0, atol=1e-14))

    def check_hermitian(self, radius: int = 4, atol: float = 1e-12) -> bool:
        """Verify ``coeff(-k) = coeff(k)*`` on every k with entries in [-radius, radius]."""
        for k in itertools.product(range(-radius, radius + 1), repeat=self.levels):
            minus = tuple(-m for m in k)
            if not np.allclose(self.coeff(minus), self.coeff(k).conj().T, rtol=0, atol=atol):
                return False
        return True


def fourier_coefficient(
    function: GeneratingFunction | CoefficientProvider, k: int | Iterable[int]
) -> np.ndarray:
    """
    Fourier coefficient block of index k.

    Scalar generating functions yield a 1 x 1 block.

    Raises:
        CoefficientError: If k has the wrong number of levels or a quadrature
            function is under-resolved for k
    """
    provider = function if isinstance(function, CoefficientProvider) else CoefficientProvider(function)
    return provider.coeff(k)


CATALOG: dict[str, str] = {
    "constant": "c (parameter: value)",
    "cosine": "alpha + beta cos(theta) (parameters: alpha, beta)",
    "banded": "finite Fourier series (parameter: coefficients {k: c_k})",
    "indicator": "characteristic function of [-a, a] (parameter: half_width)",
    "ramp": "0 on [-pi, 0], theta on (0, pi]",
    "ramp_reflected": "the ramp evaluated at -theta",
}


def catalog_function(name: str, **params: Any) -> GeneratingFunction:
    """
    Closed-form generating function by catalog name.

    Raises:
        CoefficientError: If the name is unknown or parameters do not fit
    """
    try:
        if name == "constant":
            return Constant(complex(params["value"]), dims=int(params.get("levels", 1)))
        if name == "cosine":
            return cosine(params["alpha"], params["beta"])
        if name == "banded":
            return banded(params["coefficients"], levels=int(params.get("levels", 1)))
        if name == "indicator":
            return Indicator(params["half_width"])
        if name == "ramp":
            return Ramp()
        if name == "ramp_reflected":
            return Ramp(reflected=True)
    except KeyError as err:
        raise CoefficientError(f"generating function '{name}' is missing parameter {err}") from err
    known = ", ".join(sorted(CATALOG))
    raise CoefficientError(f"unknown generating function '{name}' (known: {known})")
