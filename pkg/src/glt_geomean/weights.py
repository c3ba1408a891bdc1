"""
Weight functions for diagonal sampling matrices.

A weight a : [0, 1]^d -> C^{r x r} fills the diagonal blocks of D_n(a) with
a(i/n). Scalar weights are exact: evaluated at ``Fraction`` grid points they
return ``Fraction`` values, so branch tests such as ``x >= 1/2`` are decided
without rounding. ``SamplingWeight`` pairs a scalar weight with a constant
block, mirroring ``CoefficientProvider``.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np

from .coefficients import Block, block_array
from .errors import CoefficientError

Number = Fraction | float


class ScalarWeight(ABC):
    """Scalar function on [0, 1]."""

    @abstractmethod
    def value(self, x: Number) -> Number:
        """Value at a single coordinate."""


@dataclass(frozen=True)
class ConstantWeight(ScalarWeight):
    constant: Fraction

    def value(self, x: Number) -> Number:
        return self.constant


@dataclass(frozen=True)
class Affine(ScalarWeight):
    """``intercept + slope * x``."""

    intercept: Fraction
    slope: Fraction

    def value(self, x: Number) -> Number:
        return self.intercept + self.slope * x


@dataclass(frozen=True)
class Step(ScalarWeight):
    """``left`` on [0, at), ``right`` on [at, 1]; the jump point takes the right value."""

    at: Fraction
    left: Fraction
    right: Fraction

    def value(self, x: Number) -> Number:
        return self.right if x >= self.at else self.left


@dataclass(frozen=True)
class PiecewiseLinear(ScalarWeight):
    """
    Continuous piecewise-linear interpolant of ``(x, value)`` knots.

    The knots must be strictly increasing in x and cover [0, 1].
    """

    knots: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        xs = [x for x, _ in self.knots]
        if len(xs) < 2 or xs[0] != 0 or xs[-1] != 1:
            raise CoefficientError("piecewise-linear knots must start at 0 and end at 1")
        if any(b <= a for a, b in itertools.pairwise(xs)):
            raise CoefficientError("piecewise-linear knots must be strictly increasing")

    def value(self, x: Number) -> Number:
        for (x0, y0), (x1, y1) in itertools.pairwise(self.knots):
            if x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return self.knots[-1][1]


class WeightFunction(ABC):
    """Block-valued weight on [0, 1]^d."""

    @property
    @abstractmethod
    def levels(self) -> int: ...

    @property
    @abstractmethod
    def block_size(self) -> int: ...

    @abstractmethod
    def __call__(self, x: Sequence[Number]) -> np.ndarray:
        """The r x r block at the point x (a sequence of d coordinates)."""


@dataclass(frozen=True)
class SamplingWeight(WeightFunction):
    """
    Weight ``a_1(x_1) * ... * a_d(x_d) * block``.

    Attributes:
        factors: One scalar weight per level
        block: Constant r x r block
    """

    factors: tuple[ScalarWeight, ...]
    block: Block = ((1 + 0j,),)

    def __post_init__(self) -> None:
        if not self.factors:
            raise CoefficientError("a sampling weight needs at least one level")

    @property
    def levels(self) -> int:
        return len(self.factors)

    @property
    def block_size(self) -> int:
        return len(self.block)

    @cached_property
    def block_matrix(self) -> np.ndarray:
        return block_array(self.block)

    def scalar(self, x: Sequence[Number]) -> Number:
        """Scalar part of the weight at x, exact for Fraction input."""
        if len(x) != self.levels:
            raise CoefficientError(f"point {tuple(x)} does not have {self.levels} coordinate(s)")
        return math.prod((f.value(c) for f, c in zip(self.factors, x, strict=True)), start=1)

    def __call__(self, x: Sequence[Number]) -> np.ndarray:
        return float(self.scalar(x)) * self.block_matrix


def _fraction(value: Any) -> Fraction:
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    return Fraction(value)


WEIGHT_CATALOG: dict[str, str] = {
    "constant": "c (parameter: value)",
    "affine": "intercept + slope x",
    "step": "left on [0, at), right on [at, 1]",
    "piecewise_linear": "continuous interpolant of [[x, value], ...] knots covering [0, 1]",
}


def catalog_weight(name: str, **params: Any) -> ScalarWeight:
    """
    Scalar weight by catalog name. Numeric parameters may be ints, floats or
    rational strings such as ``"1/3"``.

    Raises:
        CoefficientError: If the name is unknown or parameters do not fit
    """
    try:
        if name == "constant":
            return ConstantWeight(_fraction(params["value"]))
        if name == "affine":
            return Affine(_fraction(params["intercept"]), _fraction(params["slope"]))
        if name == "step":
            return Step(
                _fraction(params["at"]), _fraction(params["left"]), _fraction(params["right"])
            )
        if name == "piecewise_linear":
            knots = tuple((_fraction(x), _fraction(y)) for x, y in params["knots"])
            return PiecewiseLinear(knots)
    except KeyError as err:
        raise CoefficientError(f"weight '{name}' is missing parameter {err}") from err
    except (TypeError, ValueError, ZeroDivisionError) as err:
        raise CoefficientError(f"weight '{name}' has invalid parameters: {err}") from err
    known = ", ".join(sorted(WEIGHT_CATALOG))
    raise CoefficientError(f"unknown weight '{name}' (known: {known})")
