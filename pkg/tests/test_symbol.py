"""Tests for symbol sampling, candidate symbols and quantile curves."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from glt_geomean.errors import ConvergenceError, RejectedInputError, SymbolEvaluationError
from glt_geomean.experiments import expected_symbol, geometric_mean_2x2_closed_form, get_spec
from glt_geomean.matfun import geometric_mean
from glt_geomean.sequences import glt_symbol
from glt_geomean.symbol import (
    SymbolFunction,
    candidate_point,
    constant_symbol,
    grid_nodes,
    range_basis,
    range_intersection,
    rearranged_quantile,
    sample_eigenvalues,
    zero_measure,
    zero_symbol,
)
from glt_geomean.types import HermitianMatrix

from .conftest import make_hpd

RANK_CUTOFF = 1e-8

# Kernels (1, 1, -2) and (1, -2, 1); both have (1, 1, 1) as eigenvector with eigenvalue 3.
SHARED_A = np.array([[2.0, 0.0, 1.0], [0.0, 2.0, 1.0], [1.0, 1.0, 1.0]])
SHARED_B = np.array([[2.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.0, 1.0, 2.0]])


def _rank(matrix: np.ndarray) -> int:
    singular = np.linalg.svd(matrix, compute_uv=False)
    if singular.size == 0 or singular[0] == 0:
        return 0
    return int(np.count_nonzero(singular > RANK_CUTOFF * singular[0]))


def _psd_from_columns(columns: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    weights = rng.uniform(1.0, 2.0, columns.shape[1])
    return (columns * weights) @ columns.T


class TestCandidatePoint:
    """Tests for candidate_point."""

    def test_full_rank_pair(self) -> None:
        """Test that two PD blocks give their geometric mean."""
        kappa = np.array([[2.0, 1.0], [1.0, 2.0]])
        xi = np.array([[3.0, 1.0], [1.0, 1.0]])

        result = candidate_point(kappa, xi)

        assert np.linalg.norm(result - geometric_mean_2x2_closed_form()) < 1e-7

    def test_zero_argument(self) -> None:
        """Test that a vanishing argument gives the zero matrix."""
        result = candidate_point(np.zeros((2, 2)), np.array([[3.0, 1.0], [1.0, 1.0]]))

        assert_allclose(result, np.zeros((2, 2)))

    def test_transversal_rank_one_blocks(self) -> None:
        """Test span{(1, 1)} and span{(1, 2)}: the ranges meet only at 0."""
        kappa = 0.7 * np.array([[1.0, 1.0], [1.0, 1.0]])
        xi = 2.5 * np.array([[1.0, 2.0], [2.0, 4.0]])

        assert_allclose(candidate_point(kappa, xi), np.zeros((2, 2)))

    def test_shared_rank_one_direction(self) -> None:
        """Test kernels (1, 1, -2) and (1, -2, 1): the limit is 3 times the projector on (1, 1, 1)."""
        result = candidate_point(SHARED_A, SHARED_B)

        assert_allclose(result, np.ones((3, 3)), atol=1e-6)

    def test_rejects_indefinite_input(self) -> None:
        """Test that a negative eigenvalue is rejected."""
        with pytest.raises(RejectedInputError, match="positive semidefinite"):
            candidate_point(np.diag([1.0, -1.0]), np.eye(2))

    def test_rejects_size_mismatch(self) -> None:
        """Test that blocks of different size are rejected."""
        with pytest.raises(RejectedInputError, match="size mismatch"):
            candidate_point(np.eye(2), np.eye(3))

    def test_exhausted_schedule(self) -> None:
        """Test that a zero tolerance on a singular pair reports the smallest gap."""
        with pytest.raises(ConvergenceError) as excinfo:
            candidate_point(SHARED_A, SHARED_B, tol=0.0)

        assert math.isfinite(excinfo.value.gap)
        assert excinfo.value.gap >= 0

    def test_ill_conditioned_pd_pair(self) -> None:
        """Test that a full-rank pair with spread spectra equals its geometric mean."""
        kappa = np.diag([1.0, 100.0])
        xi = np.array([[50.0, 20.0], [20.0, 10.0]])

        result = candidate_point(kappa, xi)

        exact = geometric_mean(HermitianMatrix(kappa), HermitianMatrix(xi)).entries
        assert_allclose(result, exact, rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize(
        ("s", "t"),
        [(1.5, 2.0), (0.5 * (2 + math.cos(-3.0788)), 3 + math.cos(-3.0788)), (7.5, 0.02), (0.05, 3.9)],
    )
    def test_scaled_rank_deficient_blocks(self, s: float, t: float) -> None:
        """Test kappa = s A and xi = t B with A, B sharing (1, 1, 1): the limit is sqrt(st) J."""
        result = candidate_point(s * SHARED_A, t * SHARED_B)

        scale = max(1.0, 3 * s, 3 * t)
        assert_allclose(result, math.sqrt(s * t) * np.ones((3, 3)), atol=1e-4 * scale)

    def test_overlapping_supports_symbol_point(self) -> None:
        """Test the candidate of the overlapping-support symbols at a point near theta = -pi."""
        spec = get_spec("case2ex2")
        x, theta = (0.3375,), (-3.0788,)
        kappa = glt_symbol(spec.a_expr)(x, theta)
        xi = glt_symbol(spec.b_expr)(x, theta)

        result = candidate_point(kappa, xi)

        assert np.all(np.isfinite(result))
        assert np.all(np.linalg.eigvalsh(result) >= -1e-10)
        assert _rank(result) <= 1

    @given(seed=st.integers(0, 2**32 - 1), size=st.integers(1, 4))
    @settings(max_examples=200, deadline=None)
    def test_idempotent_on_pd_input(self, seed: int, size: int) -> None:
        """Test candidate_point = geometric_mean within 10 tol for PD blocks."""
        rng = np.random.default_rng(seed)
        kappa = make_hpd(rng, size, cond=1e2)
        xi = make_hpd(rng, size, cond=1e2)

        result = candidate_point(kappa.entries, xi.entries, tol=1e-8)

        exact = geometric_mean(kappa, xi).entries
        assert np.linalg.norm(result - exact) <= 1e-7

    @given(
        seed=st.integers(0, 2**32 - 1),
        size=st.integers(2, 4),
        shared=st.integers(0, 4),
        extra=st.integers(0, 4),
    )
    @settings(max_examples=50, deadline=None)
    def test_rank_law(self, seed: int, size: int, shared: int, extra: int) -> None:
        """Test rank(result) = dim(Ran kappa intersected with Ran xi)."""
        shared = min(shared, size)
        first_extra = min(extra, size - shared)
        second_extra = size - shared - first_extra
        rng = np.random.default_rng(seed)
        basis, _ = np.linalg.qr(rng.standard_normal((size, size)))
        common = basis[:, :shared]
        first = np.hstack([common, basis[:, shared : shared + first_extra]])
        tilted = basis[:, shared + first_extra :]
        if first_extra and second_extra:
            tilted = tilted + 0.5 * basis[:, shared : shared + 1]
        second = np.hstack([common, tilted])

        result = candidate_point(_psd_from_columns(first, rng), _psd_from_columns(second, rng))

        assert _rank(result) == shared
        assert np.all(np.linalg.eigvalsh(result) >= -1e-10)


class TestRanges:
    """Tests for range_basis and range_intersection."""

    def test_range_of_rank_one(self) -> None:
        """Test that J = [[1, 1], [1, 1]] has a one-dimensional range."""
        basis = range_basis(np.ones((2, 2)))

        assert basis.shape == (2, 1)
        assert_allclose(np.abs(basis[:, 0]), [1 / math.sqrt(2)] * 2)

    def test_zero_matrix_has_empty_range(self) -> None:
        """Test the empty basis of the zero matrix."""
        assert range_basis(np.zeros((3, 3))).shape == (3, 0)

    def test_intersection_of_planes(self) -> None:
        """Test two planes in R^3 meeting along (1, 1, 1)."""
        first = range_basis(np.array([[2.0, 0.0, 1.0], [0.0, 2.0, 1.0], [1.0, 1.0, 1.0]]))
        second = range_basis(np.array([[2.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.0, 1.0, 2.0]]))

        meet = range_intersection(first, second)

        assert meet.shape == (3, 1)
        assert_allclose(np.abs(meet[:, 0]), [1 / math.sqrt(3)] * 3)


class TestSymbolFunction:
    """Tests for SymbolFunction and grid sampling."""

    def test_call_checks_coordinates(self) -> None:
        """Test that the number of coordinates must match the levels."""
        with pytest.raises(RejectedInputError, match="coordinate"):
            constant_symbol(1.0)((0.5, 0.5), (0.0, 0.0))

    def test_grid_nodes_order(self) -> None:
        """Test midpoint nodes with x varying slowest."""
        nodes = list(grid_nodes(1, 2, 4))

        assert len(nodes) == 8
        assert nodes[0] == ((0.25,), (-math.pi + math.pi / 4,))
        assert nodes[1][0] == (0.25,)
        assert nodes[4][0] == (0.75,)
        assert nodes[-1][1][0] == pytest.approx(math.pi - math.pi / 4)

    def test_threads_do_not_change_order(self) -> None:
        """Test that threaded sampling returns the sequential result."""
        sym = expected_symbol(get_spec("ex1"))

        sequential = sample_eigenvalues(sym, 8, 10)
        threaded = sample_eigenvalues(sym, 8, 10, workers=4)

        assert_allclose(threaded, sequential, rtol=0, atol=0)

    def test_failure_names_the_node(self) -> None:
        """Test that a failing symbol reports where it failed."""

        def broken(x: np.ndarray, theta: np.ndarray) -> np.ndarray:
            if x[0] > 0.5:
                raise ValueError("outside the support")
            return np.eye(1)

        sym = SymbolFunction(1, 1, broken, name="broken")

        with pytest.raises(SymbolEvaluationError) as excinfo:
            sample_eigenvalues(sym, 2, 2)

        assert excinfo.value.x == (0.75,)

    def test_rejects_empty_grid(self) -> None:
        """Test that grid sizes below 1 are rejected."""
        with pytest.raises(RejectedInputError, match="grid"):
            sample_eigenvalues(zero_symbol(), 0, 5)


class TestRearrangedQuantile:
    """Tests for rearranged_quantile and zero_measure."""

    def test_constant_symbol(self) -> None:
        """Test that a constant block gives plateaus at its eigenvalues."""
        curve = rearranged_quantile(constant_symbol(np.diag([1.0, 3.0])), 4, 5)

        assert curve.samples.size == 40
        assert_allclose(curve.samples[:20], 1.0)
        assert_allclose(curve.samples[20:], 3.0)

    def test_clamps_roundoff_negatives(self) -> None:
        """Test that eigenvalues just below zero become 0."""
        curve = rearranged_quantile(constant_symbol(-1e-12), 2, 2)

        assert_allclose(curve.samples, 0.0, rtol=0, atol=0)

    def test_ex1_symbol(self) -> None:
        """Test sqrt(a(x) (3 + 2 cos theta)): half zeros, then values in [1, sqrt(5)]."""
        curve = rearranged_quantile(expected_symbol(get_spec("ex1")))

        assert curve.samples.size == 2000
        assert np.all(np.diff(curve.samples) >= 0)
        assert_allclose(curve.samples[:1000], 0.0)
        assert curve.samples[1000] >= 1.0
        assert curve.samples[-1] <= math.sqrt(5.0)

    def test_zero_symbol_measure(self) -> None:
        """Test that the zero symbol has zero set of full measure."""
        assert zero_measure(zero_symbol(2), 0.1) == 1.0

    def test_nested_supports_measure(self) -> None:
        """Test the target 1 - 1/(4 pi) of the nested indicator construction."""
        measure = zero_measure(expected_symbol(get_spec("case1ex2")), 0.1)

        assert measure == pytest.approx(1 - 1 / (4 * math.pi), abs=0.005)

    def test_overlapping_supports_measure(self) -> None:
        """Test the target 17/18 of the overlapping-support construction."""
        measure = zero_measure(expected_symbol(get_spec("case2ex2")), 0.1, workers=4)

        assert measure == pytest.approx(17 / 18, abs=0.005)

    def test_grid_refinement(self) -> None:
        """Test that doubling the grid moves the measure by less than 2 / min(Mx, Mtheta)."""
        sym = expected_symbol(get_spec("case1ex2"))

        coarse = zero_measure(sym, 0.1, 40, 50)
        fine = zero_measure(sym, 0.1, 80, 100)

        assert abs(fine - coarse) < 2 / 40

    def test_negative_threshold(self) -> None:
        """Test that thresholds below zero are rejected."""
        with pytest.raises(RejectedInputError, match="threshold"):
            zero_measure(zero_symbol(), -0.1)

    def test_hpd_symbol_passes_through(self) -> None:
        """Test that an HPD constant symbol keeps its eigenvalue."""
        block = make_hpd(np.random.default_rng(7), 3, cond=10.0)
        curve = rearranged_quantile(constant_symbol(block.entries), 1, 1)

        assert_allclose(curve.samples, np.linalg.eigvalsh(block.entries), rtol=1e-12)
