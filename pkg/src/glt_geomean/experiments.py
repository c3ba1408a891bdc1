"""
Experiment catalog and run harness.

Each experiment pairs two HPD matrix sequences {A_n}, {B_n} with the symbol
their geometric means are expected to follow. A run builds the pair for every
n, takes the geometric mean, and compares the sorted spectrum with the
symbol's quantile curve, collecting extremal eigenvalues, decay exponents and
zero-cluster fractions on the way.

The six built-in experiments cover a commuting pair with a nonzero symbol,
a commuting pair whose symbol vanishes, and four non-commuting block pairs
with rank-deficient symbols.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import TypeVar

import numpy as np

from . import report
from .coefficients import CoefficientProvider, GeneratingFunction, Indicator, Ramp, cosine, freeze_block
from .errors import ExperimentError, RejectedInputError
from .matfun import alt_mean, geometric_mean
from .sequences import (
    Congruence,
    DiagSampling,
    FractionalPower,
    Identity,
    SequenceExpr,
    Toeplitz,
    evaluate_sequence,
    glt_symbol,
    scaled,
    sum_of,
)
from .spectra import (
    ZERO_THRESHOLD,
    decay_exponents,
    extremal_stats,
    quantile_distance,
    spectrum_distance,
    spectrum_of,
    zero_distribution_diagnostic,
    zero_fraction,
)
from .symbol import (
    DEFAULT_GRID,
    DEFAULT_TOL,
    SymbolFunction,
    candidate_symbol,
    rearranged_quantile,
    zero_symbol,
)
from .types import CrossCheck, ExperimentReport, HermitianMatrix, QuantileCurve, ReportRow, SpectrumSample
from .weights import Affine, PiecewiseLinear, SamplingWeight, ScalarWeight, Step

logger = logging.getLogger(__name__)

DEFAULT_N_LIST = (40, 80, 160, 320)

T = TypeVar("T")


@dataclass(frozen=True)
class ExperimentSpec:
    """
    A pair of HPD matrix sequences and the symbol of their geometric mean.

    Attributes:
        id: Experiment identifier, used in file names
        description: One-line description of the construction
        a_expr: Expression building A_n
        b_expr: Expression building B_n
        expected: Expected symbol of G(A_n, B_n); None derives the candidate
            symbol of the GLT symbols of the two expressions
        n_list: Sequence parameters, strictly increasing, each >= 2
        threshold: Zero-cluster threshold
        grid: Symbol sampling grid (Mx, Mtheta)
        target_zero_measure: Limit the zero fractions should approach; None
            uses the zero measure of the expected symbol on the grid
    """

    id: str
    description: str
    a_expr: SequenceExpr
    b_expr: SequenceExpr
    expected: SymbolFunction | None = field(default=None, compare=False)
    n_list: tuple[int, ...] = DEFAULT_N_LIST
    threshold: float = ZERO_THRESHOLD
    grid: tuple[int, int] = DEFAULT_GRID
    target_zero_measure: float | None = None

    @property
    def levels(self) -> int:
        return self.a_expr.levels

    @property
    def block_size(self) -> int:
        return self.a_expr.block_size

    def validate(self) -> None:
        """
        Raises:
            RejectedInputError: If n_list, threshold or grid are out of range,
                or the two expressions differ in levels or block size
        """
        if not self.n_list:
            raise RejectedInputError(f"{self.id}: n_list is empty")
        if any(n < 2 for n in self.n_list):
            raise RejectedInputError(f"{self.id}: every n must be >= 2, got {self.n_list}")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise RejectedInputError(f"{self.id}: n_list must be strictly increasing, got {self.n_list}")
        if self.threshold < 0:
            raise RejectedInputError(f"{self.id}: threshold must be >= 0, got {self.threshold}")
        if min(self.grid) < 1:
            raise RejectedInputError(f"{self.id}: grid sizes must be >= 1, got {self.grid}")
        shapes = {(e.levels, e.block_size) for e in (self.a_expr, self.b_expr)}
        if len(shapes) != 1:
            raise RejectedInputError(f"{self.id}: A and B differ in levels or block size: {shapes}")
        self.a_expr.validate()
        self.b_expr.validate()


def _toeplitz(
    function: GeneratingFunction, block: Sequence[Sequence[float]] = ((1,),), *, declared_hpd: bool = False
) -> Toeplitz:
    provider = CoefficientProvider(function, freeze_block(block))
    return Toeplitz(provider=provider, declared_hpd=declared_hpd)


def _sampling(weight: ScalarWeight, block: Sequence[Sequence[float]] = ((1,),)) -> DiagSampling:
    return DiagSampling(weight=SamplingWeight((weight,), freeze_block(block)))


def _knots(*points: tuple[int | str, int | str]) -> PiecewiseLinear:
    return PiecewiseLinear(tuple((Fraction(x), Fraction(y)) for x, y in points))


HALF = Fraction(1, 2)
CASE1_A = ((2, 1), (1, 2))
CASE1_B = ((3, 1), (1, 1))
CASE2_ONES = ((1, 1), (1, 1))
CASE2_B = ((1, 2), (2, 4))
CASE2EX2_A = ((2, 0, 1), (0, 2, 1), (1, 1, 1))
CASE2EX2_B = ((2, 1, 0), (1, 1, 1), (0, 1, 2))


def geometric_mean_2x2_closed_form() -> np.ndarray:
    """G([[2, 1], [1, 2]], [[3, 1], [1, 1]]) in closed form."""
    r2, r3, r6 = math.sqrt(2), math.sqrt(3), math.sqrt(6)
    scale = 1.0 / (6**0.25 * math.sqrt(2 + r6))
    return scale * np.array([[2 * r2 + 3 * r3, r2 + r3], [r2 + r3, 2 * r2 + r3]])


def _ex1_symbol() -> SymbolFunction:
    step = Step(HALF, Fraction(0), Fraction(1))

    def value(x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return np.array([[math.sqrt(float(step.value(float(x[0]))) * (3 + 2 * math.cos(theta[0])))]])

    return SymbolFunction(1, 1, value, name="sqrt(a(x) (3 + 2 cos theta))")


def _case1ex2_symbol() -> SymbolFunction:
    mean = geometric_mean_2x2_closed_form()
    support = Indicator(Fraction(1, 4))

    def value(x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return float(support(theta[0]).real) * mean

    return SymbolFunction(1, 2, value, name="chi_[-1/4,1/4](theta) C")


def _ex1() -> ExperimentSpec:
    a = sum_of(
        _sampling(Step(HALF, Fraction(0), Fraction(1))), scaled(-4, Identity()), declared_hpd=True
    )
    return ExperimentSpec(
        id="ex1",
        description="D_n(a) + n^-4 I and T_n(3 + 2 cos theta), a the step 1_[1/2, 1]",
        a_expr=a,
        b_expr=_toeplitz(cosine(3, 2), declared_hpd=True),
        expected=_ex1_symbol(),
        target_zero_measure=0.5,
    )


def _ex2() -> ExperimentSpec:
    a = sum_of(
        _sampling(Step(HALF, Fraction(0), Fraction(1))), scaled(-4, Identity()), declared_hpd=True
    )
    complement = sum_of(_sampling(Step(HALF, Fraction(1), Fraction(0))), scaled(-4, Identity()))
    b = Congruence(inner=_toeplitz(cosine(3, 2)), outer=complement, declared_hpd=True)
    return ExperimentSpec(
        id="ex2",
        description="D_n(a) + n^-4 I and M T_n(3 + 2 cos theta) M with M = D_n(1 - a) + n^-4 I",
        a_expr=a,
        b_expr=b,
        expected=zero_symbol(),
        target_zero_measure=1.0,
    )


def _case1ex1() -> ExperimentSpec:
    shift = scaled(-3, Identity(size=2))
    return ExperimentSpec(
        id="case1ex1",
        description="T_n(ramp A) + n^-3 I and T_n(reflected ramp B) + n^-3 I, disjoint frequency supports",
        a_expr=sum_of(_toeplitz(Ramp(), CASE1_A), shift, declared_hpd=True),
        b_expr=sum_of(_toeplitz(Ramp(reflected=True), CASE1_B), shift, declared_hpd=True),
        expected=zero_symbol(2),
        target_zero_measure=1.0,
    )


def _case1ex2() -> ExperimentSpec:
    shift = scaled(-3, Identity(size=2))
    return ExperimentSpec(
        id="case1ex2",
        description="T_n(chi_1/2 A) + n^-3 I and T_n(chi_1/4 B) + n^-3 I, nested frequency supports",
        a_expr=sum_of(_toeplitz(Indicator(HALF), CASE1_A), shift, declared_hpd=True),
        b_expr=sum_of(_toeplitz(Indicator(Fraction(1, 4)), CASE1_B), shift, declared_hpd=True),
        expected=_case1ex2_symbol(),
        target_zero_measure=1 - 1 / (4 * math.pi),
    )


def _case2ex1() -> ExperimentSpec:
    lifted = _sampling(Affine(Fraction(1), Fraction(1)), ((1, 0), (0, 1)))
    return ExperimentSpec(
        id="case2ex1",
        description="T_n((2 - cos theta) J) + n^-2 I and T_n((3 + cos theta) B) + n^-2 D_n(1 + x), transversal ranges",
        a_expr=sum_of(_toeplitz(cosine(2, -1), CASE2_ONES), scaled(-2, Identity(size=2)), declared_hpd=True),
        b_expr=sum_of(_toeplitz(cosine(3, 1), CASE2_B), scaled(-2, lifted), declared_hpd=True),
        expected=zero_symbol(2),
        target_zero_measure=1.0,
    )


def _case2ex2() -> ExperimentSpec:
    identity3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    a = _knots((0, 1), ("1/2", 0), (1, 0))
    b = _knots((0, 0), ("1/3", 0), ("1/2", "1/6"), ("2/3", 0), (1, 0))
    shift = scaled(-1, Identity(size=3), base=5)

    def side(weight: ScalarWeight, function: GeneratingFunction, block: Sequence[Sequence[int]]) -> SequenceExpr:
        root = FractionalPower(operand=_sampling(weight, identity3), exponent=HALF)
        core = Congruence(inner=_toeplitz(function, block), outer=root)
        return sum_of(core, shift, declared_hpd=True)

    a_expr = side(a, cosine(2, 1), CASE2EX2_A)
    b_expr = side(b, cosine(3, 1), CASE2EX2_B)
    return ExperimentSpec(
        id="case2ex2",
        description="D_n(a)^1/2 T_n((2 + cos theta) A) D_n(a)^1/2 + (5n)^-1 I and the same with b, B; overlapping supports",
        a_expr=a_expr,
        b_expr=b_expr,
        expected=None,
        target_zero_measure=17 / 18,
    )


_BUILDERS: dict[str, Callable[[], ExperimentSpec]] = {
    "ex1": _ex1,
    "ex2": _ex2,
    "case1ex1": _case1ex1,
    "case1ex2": _case1ex2,
    "case2ex1": _case2ex1,
    "case2ex2": _case2ex2,
}

CATALOG_IDS: tuple[str, ...] = tuple(_BUILDERS)


def get_spec(experiment_id: str) -> ExperimentSpec:
    """
    Built-in experiment by identifier.

    Raises:
        RejectedInputError: If the identifier is not in the catalog
    """
    try:
        return _BUILDERS[experiment_id]()
    except KeyError:
        known = ", ".join(CATALOG_IDS)
        raise RejectedInputError(f"unknown experiment '{experiment_id}' (known: {known})") from None


def catalog_specs(ids: Iterable[str] | None = None) -> list[ExperimentSpec]:
    """Built-in experiments in catalog order, or the requested subset in the given order."""
    return [get_spec(i) for i in (CATALOG_IDS if ids is None else ids)]


def build_pair(spec: ExperimentSpec, n: int) -> tuple[HermitianMatrix, HermitianMatrix]:
    """
    Evaluate A_n and B_n.

    Returns:
        Two HPD-certified matrices of equal size

    Raises:
        RejectedInputError: If n < 2
        ConstructionError: If either matrix fails certification
    """
    if n < 2:
        raise RejectedInputError(f"n must be >= 2, got {n}")
    a = evaluate_sequence(spec.a_expr, n)
    b = evaluate_sequence(spec.b_expr, n)
    if a.size != b.size:
        raise RejectedInputError(f"A_n and B_n differ in size: {a.size} vs {b.size}")
    return a, b


def expected_symbol(spec: ExperimentSpec, tol: float = DEFAULT_TOL) -> SymbolFunction:
    """The experiment's declared symbol, or the candidate symbol of the two GLT symbols."""
    if spec.expected is not None:
        return spec.expected
    return candidate_symbol(
        glt_symbol(spec.a_expr), glt_symbol(spec.b_expr), tol=tol, name=f"candidate symbol of {spec.id}"
    )


def _stage(spec: ExperimentSpec, n: int | None, stage: str, action: Callable[[], T]) -> T:
    try:
        return action()
    except ExperimentError:
        raise
    except Exception as err:
        raise ExperimentError(spec.id, n, stage, str(err)) from err


def _measure(spec: ExperimentSpec, n: int, curve: QuantileCurve) -> tuple[ReportRow, SpectrumSample]:
    a, b = _stage(spec, n, "build", lambda: build_pair(spec, n))
    mean = _stage(spec, n, "mean", lambda: geometric_mean(a, b))
    sample = _stage(spec, n, "spectrum", lambda: spectrum_of(mean, n, spec.id))
    stats = _stage(spec, n, "statistics", lambda: extremal_stats(sample))
    sup_dist, mean_abs = quantile_distance(sample, curve)
    row = ReportRow(
        n=n,
        d_n=sample.d_n,
        lambda_min=stats.lambda_min,
        lambda_max=stats.lambda_max,
        cond2=stats.cond2,
        zero_fraction=zero_fraction(sample, spec.threshold),
        sup_dist=sup_dist,
        mean_abs_dist=mean_abs,
    )
    logger.info(
        f"{spec.id} n={n}: lambda_min={row.lambda_min:.4e} lambda_max={row.lambda_max:.8f} "
        f"zero_fraction={row.zero_fraction:.4f}"
    )
    return row, sample


def run_experiment(
    spec: ExperimentSpec,
    *,
    workers: int = 1,
    out_dir: Path | None = None,
    svg: bool = False,
    tol: float = DEFAULT_TOL,
) -> ExperimentReport:
    """
    Run an experiment over its n_list.

    Args:
        spec: Experiment to run
        workers: Threads used for the n values and for symbol sampling
        out_dir: Directory receiving the CSV (and SVG) artifacts; None writes nothing
        svg: Also render the quantile overlay of every n
        tol: Convergence tolerance of numerically computed candidate symbols

    Returns:
        The report, rows ordered by n

    Raises:
        ExperimentError: Naming the failing n and stage
    """
    _stage(spec, None, "validate", spec.validate)
    logger.info(f"running {spec.id}: n = {', '.join(map(str, spec.n_list))}")
    symbol = _stage(spec, None, "symbol", lambda: expected_symbol(spec, tol))
    curve = _stage(spec, None, "symbol", lambda: rearranged_quantile(symbol, *spec.grid, workers=workers))
    target = spec.target_zero_measure
    if target is None:
        target = curve.fraction_at_or_below(spec.threshold)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda n: _measure(spec, n, curve), spec.n_list))
    else:
        results = [_measure(spec, n, curve) for n in spec.n_list]
    rows = [row for row, _ in results]
    spectra = [sample for _, sample in results]

    alphas = decay_exponents([row.lambda_min for row in rows]) if len(rows) > 1 else []
    result = ExperimentReport(
        experiment_id=spec.id,
        description=spec.description,
        rows=rows,
        alphas=alphas,
        target_zero_measure=target,
        symbol_min=float(curve.samples[0]),
        symbol_max=float(curve.samples[-1]),
        schatten_trend=zero_distribution_diagnostic(spectra, 1.0),
    )
    if out_dir is not None:
        result.artifacts = _stage(
            spec, None, "emit", lambda: report.write_experiment(result, spectra, curve, out_dir, svg=svg)
        )
    logger.info(f"finished {spec.id}")
    return result


def cross_check_means(
    spec: ExperimentSpec, n: int, symbol_curve: QuantileCurve | None = None, tol: float = DEFAULT_TOL
) -> CrossCheck:
    """
    Compare the spectra of the geometric mean and of ``(A B^2 A)^{1/4}`` at n.

    Both should follow the same quantile curve as n grows even where A_n and
    B_n do not commute.
    """
    curve = symbol_curve
    if curve is None:
        symbol = _stage(spec, None, "symbol", lambda: expected_symbol(spec, tol))
        curve = _stage(spec, None, "symbol", lambda: rearranged_quantile(symbol, *spec.grid))
    a, b = _stage(spec, n, "build", lambda: build_pair(spec, n))
    geometric = _stage(spec, n, "mean", lambda: spectrum_of(geometric_mean(a, b), n, spec.id))
    alternative = _stage(spec, n, "alt-mean", lambda: spectrum_of(alt_mean(a, b), n, spec.id))
    check = CrossCheck(
        n=n,
        sup_between_means=spectrum_distance(geometric, alternative),
        sup_geometric_to_symbol=quantile_distance(geometric, curve)[0],
        sup_alternative_to_symbol=quantile_distance(alternative, curve)[0],
    )
    logger.info(
        f"{spec.id} n={n}: gm-alt {check.sup_between_means:.3e}, gm-symbol "
        f"{check.sup_geometric_to_symbol:.3e}, alt-symbol {check.sup_alternative_to_symbol:.3e}"
    )
    return check


__all__ = [
    "CATALOG_IDS",
    "DEFAULT_N_LIST",
    "ExperimentSpec",
    "build_pair",
    "catalog_specs",
    "cross_check_means",
    "expected_symbol",
    "geometric_mean_2x2_closed_form",
    "get_spec",
    "run_experiment",
]
