"""
Matrix sequences: multilevel block Toeplitz and diagonal sampling matrices,
and expression trees combining them.

Multi-indices are ordered lexicographically with the last level varying
fastest, and the block index is innermost, so the assembled matrices agree
with the Kronecker forms ``sum_j J^(j_1) x ... x J^(j_d) x f_j`` and
``D_n(a) = diag_i a(i/n)``.

Every expression node can also report the GLT symbol of the sequence it
builds: Toeplitz leaves contribute their generating function, sampling leaves
their weight, scalar scales that vanish as n grows contribute zero, and the
algebraic nodes combine pointwise.
"""

from __future__ import annotations

import itertools
import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .coefficients import CoefficientProvider, MultiIndex, as_index
from .errors import CoefficientError, ConstructionError, NotHPDError, RejectedInputError
from .matfun import certify_hpd, fractional_power
from .symbol import SymbolFunction
from .types import HermitianMatrix
from .weights import WeightFunction

logger = logging.getLogger(__name__)

# Relative Frobenius residue tolerated before a result is declared non-Hermitian.
HERMITIAN_TOL = 1e-10


def _nu(n: MultiIndex) -> int:
    return math.prod(n)


def _check_n(n: int | Iterable[int], levels: int) -> MultiIndex:
    index = as_index(n, levels)
    if any(m < 1 for m in index):
        raise RejectedInputError(f"every component of n must be >= 1, got {index}")
    return index


def _compact(arr: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(arr) and not np.any(arr.imag):
        return arr.real.copy()
    return arr


def assemble_toeplitz(provider: CoefficientProvider, n: int | Iterable[int]) -> np.ndarray:
    """
    Raw block Toeplitz matrix whose (i, j) block is ``coeff(i - j)``.

    No symmetrization is applied; see ``toeplitz`` for the Hermitian wrapper.

    Raises:
        CoefficientError: If n does not have ``provider.levels`` components
    """
    index = _check_n(n, provider.levels)
    r = provider.block_size
    offsets = [range(-(m - 1), m) for m in index]
    table = np.zeros([2 * m - 1 for m in index] + [r, r], dtype=np.complex128)
    for k in itertools.product(*offsets):
        table[tuple(kl + m - 1 for kl, m in zip(k, index, strict=True))] = provider.coeff(k)

    rows = np.indices(index).reshape(len(index), -1)
    diff = tuple(
        rows[level][:, None] - rows[level][None, :] + index[level] - 1
        for level in range(len(index))
    )
    nu = _nu(index)
    blocks = table[diff]
    matrix = blocks.transpose(0, 2, 1, 3).reshape(nu * r, nu * r)
    return _compact(matrix)


def toeplitz(provider: CoefficientProvider, n: int | Iterable[int]) -> HermitianMatrix | np.ndarray:
    """
    Multilevel block Toeplitz matrix ``T_n(f)``.

    Returns:
        A ``HermitianMatrix`` when the provider is Hermitian-valued, otherwise
        the raw square array
    """
    matrix = assemble_toeplitz(provider, n)
    return HermitianMatrix(matrix) if provider.hermitian else matrix


def diag_sampling(weight: WeightFunction, n: int | Iterable[int]) -> np.ndarray:
    """
    Block diagonal sampling matrix ``D_n(a)`` with blocks ``a(i/n)``, i = 1..n.

    Grid points are exact fractions, so branch conditions of the weight are
    decided without rounding.
    """
    index = _check_n(n, weight.levels)
    r = weight.block_size
    nu = _nu(index)
    matrix = np.zeros((nu * r, nu * r), dtype=np.complex128)
    grids = [[Fraction(i, m) for i in range(1, m + 1)] for m in index]
    for position, point in enumerate(itertools.product(*grids)):
        start = position * r
        matrix[start : start + r, start : start + r] = weight(point)
    return _compact(matrix)


@dataclass(frozen=True)
class ScaleRule:
    """
    Scalar sequence ``c(n) = factor * (base * n)^exponent``.

    For multilevel n the geometric mean of its components plays the role of n.
    """

    exponent: Fraction
    factor: Fraction = Fraction(1)
    base: Fraction = Fraction(1)

    def value(self, n: MultiIndex) -> float:
        size = _nu(n) ** (1.0 / len(n))
        return float(self.factor) * (float(self.base) * size) ** float(self.exponent)

    def limit(self) -> float:
        """Limit of c(n) as n grows."""
        if self.exponent < 0:
            return 0.0
        if self.exponent == 0:
            return float(self.factor)
        raise ConstructionError("scale factor diverges, the sequence has no symbol", "scale")

    def describe(self) -> str:
        base = "n" if self.base == 1 else f"({self.base} n)"
        factor = "" if self.factor == 1 else f"{self.factor} * "
        return f"{factor}{base}^{self.exponent}"


@dataclass(frozen=True, kw_only=True)
class SequenceExpr(ABC):
    """
    Node of a matrix-sequence expression.

    Attributes:
        declared_hpd: The node's matrix must pass HPD certification
        label: Name used in error messages ("" uses the node description)
    """

    declared_hpd: bool = False
    label: str = ""

    @property
    @abstractmethod
    def levels(self) -> int: ...

    @property
    @abstractmethod
    def block_size(self) -> int: ...

    @abstractmethod
    def children(self) -> tuple[SequenceExpr, ...]: ...

    @abstractmethod
    def build(self, n: MultiIndex) -> np.ndarray:
        """Matrix at n; children are evaluated through ``_evaluate``."""

    @abstractmethod
    def symbol_at(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """GLT symbol of the sequence at (x, theta)."""

    @abstractmethod
    def describe(self) -> str: ...

    def name(self) -> str:
        return self.label or self.describe()

    def walk(self) -> Iterator[SequenceExpr]:
        """Pre-order traversal of the subtree."""
        yield self
        for child in self.children():
            yield from child.walk()

    def validate(self) -> None:
        """
        Check that levels and block sizes agree across the subtree.

        Raises:
            ConstructionError: Naming the first inconsistent node
        """
        for child in self.children():
            child.validate()
            if (child.levels, child.block_size) != (self.levels, self.block_size):
                raise ConstructionError(
                    f"operand has d={child.levels}, r={child.block_size} but the expression "
                    f"has d={self.levels}, r={self.block_size}",
                    child.name(),
                )


@dataclass(frozen=True, kw_only=True)
class Toeplitz(SequenceExpr):
    provider: CoefficientProvider

    @property
    def levels(self) -> int:
        return self.provider.levels

    @property
    def block_size(self) -> int:
        return self.provider.block_size

    def children(self) -> tuple[SequenceExpr, ...]:
        return ()

    def build(self, n: MultiIndex) -> np.ndarray:
        return assemble_toeplitz(self.provider, n)

    def symbol_at(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return self.provider.evaluate(theta)

    def describe(self) -> str:
        return f"T_n({type(self.provider.function).__name__})"


@dataclass(frozen=True, kw_only=True)
class DiagSampling(SequenceExpr):
    weight: WeightFunction

    @property
    def levels(self) -> int:
        return self.weight.levels

    @property
    def block_size(self) -> int:
        return self.weight.block_size

    def children(self) -> tuple[SequenceExpr, ...]:
        return ()

    def build(self, n: MultiIndex) -> np.ndarray:
        return diag_sampling(self.weight, n)

    def symbol_at(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return self.weight(tuple(float(c) for c in x))

    def describe(self) -> str:
        return "D_n(a)"


@dataclass(frozen=True, kw_only=True)
class Identity(SequenceExpr):
    size: int = 1
    dims: int = 1

    @property
    def levels(self) -> int:
        return self.dims

    @property
    def block_size(self) -> int:
        return self.size

    def children(self) -> tuple[SequenceExpr, ...]:
        return ()

    def build(self, n: MultiIndex) -> np.ndarray:
        return np.eye(_nu(n) * self.size)

    def symbol_at(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return np.eye(self.size)

    def describe(self) -> str:
        return f"I_{self.size}n"


@dataclass(frozen=True, kw_only=True)
class _Combination(SequenceExpr):
    operands: tuple[SequenceExpr, ...]

    def __post_init__(self) -> None:
        if not self.operands:
            raise ConstructionError("needs at least one operand", type(self).__name__)

    @property
    def levels(self) -> int:
        return self.operands[0].levels

    @property
    def block_size(self) -> int:
        return self.operands[0].block_size

    def children(self) -> tuple[SequenceExpr, ...]:
        return self.operands


@dataclass(frozen=True, kw_only=True)
class Sum(_Combination):
    def build(self, n: MultiIndex) -> np.ndarray:
        return reduce(np.add, (_evaluate(term, n) for term in self.operands))

    def symbol_at(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return reduce(np.add, (term.symbol_at(x, theta) for term in self.operands))

    def describe(self) -> str:
        return " + ".join(term.name() for term in self.operands)


@dataclass(frozen=True, kw_only=True)
class Product(_Combination):
    def build(self, n: MultiIndex) -> np.ndarray:
        return reduce(np.matmul, (_evaluate(factor, n) for factor in self.operands))

    def symbol_at(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return reduce(np.matmul, (factor.symbol_at(x, theta) for factor in self.operands))

    def describe(self) -> str:
        return " ".join(f"({factor.name()})" for factor in self.operands)


@dataclass(frozen=True, kw_only=True)
class ScalarScale(SequenceExpr):
    rule: ScaleRule
    operand: SequenceExpr

    @property
    def levels(self) -> int:
        return self.operand.levels

    @property
    def block_size(self) -> int:
        return self.operand.block_size

    def children(self) -> tuple[SequenceExpr, ...]:
        return (self.operand,)

    def build(self, n: MultiIndex) -> np.ndarray:
        return self.rule.value(n) * _evaluate(self.operand, n)

    def symbol_at(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        limit = self.rule.limit()
        if limit == 0.0:
            return np.zeros((self.block_size, self.block_size))
        return limit * self.operand.symbol_at(x, theta)

    def describe(self) -> str:
        return f"{self.rule.describe()} {self.operand.name()}"


@dataclass(frozen=True, kw_only=True)
class Congruence(SequenceExpr):
    """``M X M`` with M = ``outer`` and X = ``inner``."""

    inner: SequenceExpr
    outer: SequenceExpr

    @property
    def levels(self) -> int:
        return self.inner.levels

    @property
    def block_size(self) -> int:
        return self.inner.block_size

    def children(self) -> tuple[SequenceExpr, ...]:
        return (self.inner, self.outer)

    def build(self, n: MultiIndex) -> np.ndarray:
        outer = _evaluate(self.outer, n)
        return outer @ _evaluate(self.inner, n) @ outer

    def symbol_at(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        outer = self.outer.symbol_at(x, theta)
        return outer @ self.inner.symbol_at(x, theta) @ outer

    def describe(self) -> str:
        return f"({self.outer.name()}) ({self.inner.name()}) ({self.outer.name()})"


@dataclass(frozen=True, kw_only=True)
class FractionalPower(SequenceExpr):
    """Real power of a Hermitian (PSD for non-integer exponents) operand."""

    operand: SequenceExpr
    exponent: Fraction

    @property
    def levels(self) -> int:
        return self.operand.levels

    @property
    def block_size(self) -> int:
        return self.operand.block_size

    def children(self) -> tuple[SequenceExpr, ...]:
        return (self.operand,)

    def build(self, n: MultiIndex) -> np.ndarray:
        base = HermitianMatrix(_evaluate(self.operand, n))
        return fractional_power(base, float(self.exponent)).entries

    def symbol_at(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        base = HermitianMatrix(self.operand.symbol_at(x, theta))
        return fractional_power(base, float(self.exponent)).entries

    def describe(self) -> str:
        return f"({self.operand.name()})^{self.exponent}"


def _evaluate(node: SequenceExpr, n: MultiIndex) -> np.ndarray:
    try:
        matrix = node.build(n)
    except (ConstructionError, CoefficientError):
        raise
    except NotHPDError as err:
        raise ConstructionError(f"evaluation failed: {err}", node.name()) from err
    if node.declared_hpd:
        try:
            certify_hpd(HermitianMatrix(matrix))
        except NotHPDError as err:
            raise ConstructionError(f"declared HPD but {err}", node.name()) from err
    return matrix


def evaluate_sequence(expr: SequenceExpr, n: int | Iterable[int]) -> HermitianMatrix:
    """
    Evaluate an expression at n.

    Args:
        expr: Expression tree
        n: Sequence parameter (int for one level, or a multi-index)

    Returns:
        The Hermitian matrix of size ``r * nu(n)``, certified when the root
        node is declared HPD

    Raises:
        ConstructionError: If the tree is inconsistent, the result is not
            Hermitian, or a node declared HPD fails certification
    """
    expr.validate()
    index = _check_n(n, expr.levels)
    matrix = _evaluate(expr, index)
    expected = expr.block_size * _nu(index)
    if matrix.shape != (expected, expected):
        raise ConstructionError(f"result has shape {matrix.shape}, expected {expected}", expr.name())
    residue = float(np.linalg.norm(matrix - matrix.conj().T))
    if residue > HERMITIAN_TOL * max(1.0, float(np.linalg.norm(matrix))):
        raise ConstructionError(f"result is not Hermitian (residue {residue:.3e})", expr.name())
    logger.debug(f"evaluated {expr.name()} at n={index}: size {expected}")
    return HermitianMatrix(matrix, hpd_certified=expr.declared_hpd)


def glt_symbol(expr: SequenceExpr, name: str = "") -> SymbolFunction:
    """GLT symbol of the sequence built by ``expr``."""
    expr.validate()
    return SymbolFunction(expr.levels, expr.block_size, expr.symbol_at, name=name or expr.name())


# Typed constructors keep catalog code short.
def scaled(exponent: int | Fraction, operand: SequenceExpr, base: int | Fraction = 1) -> ScalarScale:
    """``(base * n)^exponent * operand``."""
    return ScalarScale(rule=ScaleRule(Fraction(exponent), base=Fraction(base)), operand=operand)


def sum_of(*terms: SequenceExpr, declared_hpd: bool = False, label: str = "") -> Sum:
    return Sum(operands=tuple(terms), declared_hpd=declared_hpd, label=label)


__all__ = [
    "Congruence",
    "DiagSampling",
    "FractionalPower",
    "Identity",
    "Product",
    "ScalarScale",
    "ScaleRule",
    "SequenceExpr",
    "Sum",
    "Toeplitz",
    "assemble_toeplitz",
    "diag_sampling",
    "evaluate_sequence",
    "glt_symbol",
    "scaled",
    "sum_of",
    "toeplitz",
]
