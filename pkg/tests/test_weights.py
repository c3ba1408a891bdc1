"""Tests for sampling weights."""

from __future__ import annotations

from fractions import Fraction

import pytest
from numpy.testing import assert_allclose

from glt_geomean.coefficients import freeze_block
from glt_geomean.errors import CoefficientError
from glt_geomean.weights import (
    Affine,
    ConstantWeight,
    PiecewiseLinear,
    SamplingWeight,
    Step,
    catalog_weight,
)

HALF = Fraction(1, 2)


class TestScalarWeights:
    """Tests for the scalar weight catalog."""

    def test_step_takes_right_value_at_jump(self) -> None:
        """Test that the step is decided exactly at x = 1/2."""
        step = Step(HALF, Fraction(0), Fraction(1))

        assert step.value(Fraction(1, 2)) == 1
        assert step.value(Fraction(49, 100)) == 0
        assert step.value(Fraction(1)) == 1

    def test_affine(self) -> None:
        """Test 1 + x on exact and float input."""
        weight = Affine(Fraction(1), Fraction(1))

        assert weight.value(Fraction(1, 3)) == Fraction(4, 3)
        assert weight.value(0.25) == pytest.approx(1.25)

    def test_piecewise_linear_hat(self) -> None:
        """Test the hat function with support [1/3, 2/3] and peak 1/6."""
        knots = tuple(
            (Fraction(x), Fraction(y))
            for x, y in ((0, 0), ("1/3", 0), ("1/2", "1/6"), ("2/3", 0), (1, 0))
        )
        hat = PiecewiseLinear(knots)

        assert hat.value(Fraction(1, 2)) == Fraction(1, 6)
        assert hat.value(Fraction(5, 12)) == Fraction(1, 12)
        assert hat.value(Fraction(1, 4)) == 0
        assert hat.value(Fraction(3, 4)) == 0

    def test_piecewise_linear_rejects_bad_knots(self) -> None:
        """Test that knots must cover [0, 1] in increasing order."""
        with pytest.raises(CoefficientError, match="start at 0"):
            PiecewiseLinear(((Fraction(0), Fraction(1)), (HALF, Fraction(0))))
        with pytest.raises(CoefficientError, match="increasing"):
            PiecewiseLinear(((Fraction(0), Fraction(1)), (HALF, Fraction(0)), (HALF, Fraction(1)), (Fraction(1), Fraction(0))))


class TestSamplingWeight:
    """Tests for SamplingWeight."""

    def test_block_value(self) -> None:
        """Test a(x) = (1 + x) I_2."""
        weight = SamplingWeight((Affine(Fraction(1), Fraction(1)),), freeze_block([[1, 0], [0, 1]]))

        assert weight.levels == 1
        assert weight.block_size == 2
        assert_allclose(weight((Fraction(1, 2),)), [[1.5, 0], [0, 1.5]])

    def test_separable_scalar_is_exact(self) -> None:
        """Test that the product over levels stays a Fraction."""
        weight = SamplingWeight((Affine(Fraction(0), Fraction(1)), ConstantWeight(Fraction(3))))

        assert weight.scalar((Fraction(1, 3), Fraction(1, 2))) == Fraction(1)

    def test_wrong_dimension(self) -> None:
        """Test that points with the wrong number of coordinates are rejected."""
        weight = SamplingWeight((ConstantWeight(Fraction(1)),))

        with pytest.raises(CoefficientError, match="coordinate"):
            weight.scalar((Fraction(1), Fraction(1)))


class TestCatalogWeight:
    """Tests for catalog_weight."""

    def test_rational_strings(self) -> None:
        """Test that parameters may be rational strings."""
        assert catalog_weight("step", at="1/2", left=0, right=1) == Step(HALF, Fraction(0), Fraction(1))

    def test_knots(self) -> None:
        """Test piecewise-linear construction from nested lists."""
        weight = catalog_weight("piecewise_linear", knots=[[0, 1], ["1/2", 0], [1, 0]])

        assert weight.value(Fraction(1, 4)) == HALF

    def test_unknown_name(self) -> None:
        """Test that unknown names list the catalog."""
        with pytest.raises(CoefficientError, match="unknown weight"):
            catalog_weight("gaussian")

    def test_invalid_parameter(self) -> None:
        """Test that unparsable numbers are reported."""
        with pytest.raises(CoefficientError, match="invalid parameters"):
            catalog_weight("affine", intercept="one", slope=1)
