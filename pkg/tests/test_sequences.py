"""Tests for Toeplitz assembly, diagonal sampling and sequence expressions."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from glt_geomean.coefficients import (
    CoefficientProvider,
    Constant,
    Indicator,
    Ramp,
    Separable,
    banded,
    cosine,
    freeze_block,
)
from glt_geomean.errors import CoefficientError, ConstructionError, RejectedInputError
from glt_geomean.experiments import CASE1_A, CASE2_B, CASE2_ONES, get_spec
from glt_geomean.matfun import certify_hpd
from glt_geomean.sequences import (
    Congruence,
    DiagSampling,
    FractionalPower,
    Identity,
    Product,
    ScaleRule,
    Toeplitz,
    assemble_toeplitz,
    diag_sampling,
    evaluate_sequence,
    glt_symbol,
    scaled,
    sum_of,
    toeplitz,
)
from glt_geomean.types import HermitianMatrix
from glt_geomean.weights import Affine, SamplingWeight, Step

HALF = Fraction(1, 2)


def _hermitian_band(rng: np.random.Generator, radius: int) -> CoefficientProvider:
    coefficients: dict[int, complex] = {0: complex(rng.standard_normal())}
    for k in range(1, radius + 1):
        value = complex(rng.standard_normal(), rng.standard_normal())
        coefficients[k] = value
        coefficients[-k] = value.conjugate()
    return CoefficientProvider(banded(coefficients))


class TestToeplitz:
    """Tests for toeplitz and assemble_toeplitz."""

    def test_cosine_at_two(self) -> None:
        """Test T_2(3 + 2 cos theta) = [[3, 1], [1, 3]]."""
        matrix = toeplitz(CoefficientProvider(cosine(3, 2)), 2)

        assert isinstance(matrix, HermitianMatrix)
        assert_allclose(matrix.entries, [[3, 1], [1, 3]])

    def test_constant_gives_identity(self) -> None:
        """Test T_n(1) = I_n."""
        matrix = toeplitz(CoefficientProvider(Constant(1.0)), 7)

        assert_allclose(matrix.entries, np.eye(7))

    def test_block_case_at_two(self) -> None:
        """Test T_2((2 - cos theta) [[1, 1], [1, 1]]) block by block."""
        matrix = toeplitz(CoefficientProvider(cosine(2, -1), freeze_block(CASE2_ONES)), 2)
        ones = np.ones((2, 2))

        assert_allclose(matrix.entries[:2, :2], 2 * ones)
        assert_allclose(matrix.entries[:2, 2:], -0.5 * ones)
        assert_allclose(matrix.entries[2:, :2], -0.5 * ones)
        assert_allclose(matrix.entries[2:, 2:], 2 * ones)

    def test_block_is_innermost(self) -> None:
        """Test that the block matrix agrees with the Kronecker form."""
        provider = CoefficientProvider(cosine(3, 1), freeze_block(CASE2_B))
        scalar = toeplitz(CoefficientProvider(cosine(3, 1)), 5).entries

        assert_allclose(toeplitz(provider, 5).entries, np.kron(scalar, np.array(CASE2_B)))

    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8), radius=st.integers(0, 4))
    @settings(max_examples=200, deadline=None)
    def test_toeplitz_structure(self, seed: int, n: int, radius: int) -> None:
        """Test entry (i, j) = coeff(i - j) and Hermitian closure."""
        provider = _hermitian_band(np.random.default_rng(seed), radius)

        matrix = assemble_toeplitz(provider, n)

        for i in range(n):
            for j in range(n):
                assert matrix[i, j] == pytest.approx(provider.coeff(i - j)[0, 0], abs=1e-14)
        assert_allclose(matrix, matrix.conj().T, atol=1e-14)

    def test_non_hermitian_provider_returns_array(self) -> None:
        """Test that a one-sided polynomial yields a raw (upper shift) matrix."""
        matrix = toeplitz(CoefficientProvider(banded({-1: 1.0})), 3)

        assert not isinstance(matrix, HermitianMatrix)
        assert_allclose(matrix, np.eye(3, k=1))

    def test_two_level_kronecker(self) -> None:
        """Test T_(2,3)(f1 x f2) = T_2(f1) x T_3(f2) for separable f."""
        f1, f2 = cosine(2, 1), Indicator(Fraction(1, 3))
        provider = CoefficientProvider(Separable((f1, f2)))

        matrix = toeplitz(provider, (2, 3)).entries

        expected = np.kron(
            toeplitz(CoefficientProvider(f1), 2).entries, toeplitz(CoefficientProvider(f2), 3).entries
        )
        assert matrix.shape == (6, 6)
        assert_allclose(matrix, expected, atol=1e-15)

    def test_wrong_levels(self) -> None:
        """Test that n must have one component per level."""
        with pytest.raises(CoefficientError, match="level"):
            toeplitz(CoefficientProvider(cosine(3, 2)), (2, 2))

    def test_rejects_small_n(self) -> None:
        """Test that n >= 1 is required."""
        with pytest.raises(RejectedInputError):
            toeplitz(CoefficientProvider(cosine(3, 2)), 0)


class TestDiagSampling:
    """Tests for diag_sampling."""

    def test_identity_weight(self) -> None:
        """Test D_4(x) = diag(1/4, 1/2, 3/4, 1)."""
        weight = SamplingWeight((Affine(Fraction(0), Fraction(1)),))

        assert_allclose(diag_sampling(weight, 4), np.diag([0.25, 0.5, 0.75, 1.0]))

    def test_step_is_exact(self) -> None:
        """Test that 2/4 is not rounded below the jump at 1/2."""
        weight = SamplingWeight((Step(HALF, Fraction(0), Fraction(1)),))

        assert_allclose(diag_sampling(weight, 4), np.diag([0.0, 1.0, 1.0, 1.0]))

    def test_block_weight(self) -> None:
        """Test D_2((1 + x) I_2) = diag(1.5, 1.5, 2, 2)."""
        weight = SamplingWeight((Affine(Fraction(1), Fraction(1)),), freeze_block([[1, 0], [0, 1]]))

        assert_allclose(diag_sampling(weight, 2), np.diag([1.5, 1.5, 2.0, 2.0]))

    def test_two_levels(self) -> None:
        """Test lexicographic order of a two-level sampling."""
        weight = SamplingWeight((Affine(Fraction(0), Fraction(1)), Affine(Fraction(0), Fraction(2))))

        assert_allclose(diag_sampling(weight, (2, 2)), np.diag([0.5, 1.0, 1.0, 2.0]))


class TestScaleRule:
    """Tests for ScaleRule."""

    def test_value(self) -> None:
        """Test (5n)^-1 at n = 4."""
        assert ScaleRule(Fraction(-1), base=Fraction(5)).value((4,)) == pytest.approx(1 / 20)

    def test_limit(self) -> None:
        """Test vanishing, constant and divergent scalings."""
        assert ScaleRule(Fraction(-3)).limit() == 0.0
        assert ScaleRule(Fraction(0), factor=Fraction(2)).limit() == 2.0
        with pytest.raises(ConstructionError, match="diverges"):
            ScaleRule(Fraction(1)).limit()


class TestEvaluateSequence:
    """Tests for evaluate_sequence."""

    def test_ex1_pair_at_two(self) -> None:
        """Test the step pair at n = 2; both grid points 1/2 and 1 take the right value."""
        spec = get_spec("ex1")

        a = evaluate_sequence(spec.a_expr, 2)
        b = evaluate_sequence(spec.b_expr, 2)

        assert_allclose(a.entries, np.diag([17 / 16, 17 / 16]))
        assert_allclose(b.entries, [[3, 1], [1, 3]])
        assert a.hpd_certified and b.hpd_certified

    def test_shifted_ramp_block(self) -> None:
        """Test that T_4(ramp A) + 4^-3 I has size 8 and is HPD."""
        expr = sum_of(
            Toeplitz(provider=CoefficientProvider(Ramp(), freeze_block(CASE1_A))),
            scaled(-3, Identity(size=2)),
            declared_hpd=True,
        )

        matrix = evaluate_sequence(expr, 4)

        assert matrix.size == 8
        assert matrix.hpd_certified
        assert np.linalg.eigvalsh(matrix.entries)[0] > 0

    def test_case2ex2_size(self) -> None:
        """Test that the three-block construction at n = 3 has size 9."""
        spec = get_spec("case2ex2")

        a = evaluate_sequence(spec.a_expr, 3)

        assert a.size == 9
        certify_hpd(a)

    def test_declared_hpd_failure(self) -> None:
        """Test that a declared HPD node that is only PSD names itself."""
        weight = SamplingWeight((Step(HALF, Fraction(0), Fraction(1)),))
        expr = DiagSampling(weight=weight, declared_hpd=True, label="bare step")

        with pytest.raises(ConstructionError, match="bare step"):
            evaluate_sequence(expr, 4)

    def test_level_mismatch(self) -> None:
        """Test that operands of different block size are rejected."""
        expr = sum_of(Toeplitz(provider=CoefficientProvider(cosine(3, 2))), Identity(size=2))

        with pytest.raises(ConstructionError, match="r=2"):
            evaluate_sequence(expr, 4)

    def test_non_hermitian_product(self) -> None:
        """Test that a non-Hermitian result is rejected."""
        weight = SamplingWeight((Affine(Fraction(0), Fraction(1)),))
        expr = Product(
            operands=(DiagSampling(weight=weight), Toeplitz(provider=CoefficientProvider(cosine(3, 2))))
        )

        with pytest.raises(ConstructionError, match="not Hermitian"):
            evaluate_sequence(expr, 4)

    def test_congruence_and_power(self) -> None:
        """Test D^1/2 T D^1/2 against its direct computation."""
        weight = SamplingWeight((Affine(Fraction(1), Fraction(1)),))
        root = FractionalPower(operand=DiagSampling(weight=weight), exponent=HALF)
        inner = Toeplitz(provider=CoefficientProvider(cosine(3, 2)))

        matrix = evaluate_sequence(Congruence(inner=inner, outer=root), 3)

        d = np.diag(np.sqrt([4 / 3, 5 / 3, 2.0]))
        t = np.array([[3, 1, 0], [1, 3, 1], [0, 1, 3]], dtype=float)
        assert_allclose(matrix.entries, d @ t @ d, rtol=1e-12)


class TestGLTSymbol:
    """Tests for glt_symbol."""

    def test_vanishing_scale_drops_out(self) -> None:
        """Test that n^-4 I contributes nothing to the symbol."""
        sym = glt_symbol(get_spec("ex1").a_expr)

        assert_allclose(sym(0.75, 1.0), [[1.0]])
        assert_allclose(sym(0.25, 1.0), [[0.0]])

    def test_toeplitz_symbol(self) -> None:
        """Test the symbol of T_n(3 + 2 cos theta)."""
        sym = glt_symbol(get_spec("ex1").b_expr)

        assert_allclose(sym(0.3, math.pi / 2), [[3.0]], atol=1e-15)
        assert_allclose(sym(0.3, 0.0), [[5.0]])

    def test_congruence_symbol(self) -> None:
        """Test the symbol a(x) f(theta) A of the root congruence."""
        sym = glt_symbol(get_spec("case2ex2").a_expr)

        value = sym(0.25, 0.0)

        expected = 0.5 * 3 * np.array([[2, 0, 1], [0, 2, 1], [1, 1, 1]])
        assert_allclose(value, expected, atol=1e-12)
        assert_allclose(sym(0.75, 0.0), np.zeros((3, 3)), atol=1e-12)
