"""Tests for level-set data and the Stampacchia bound."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rdlab.bounds.estimates import stampacchia_exponent
from rdlab.bounds.stampacchia import StampacchiaInstance
from rdlab.model.exceptions import ParameterError
from tests.estimates.test_helpers import EstimateTestHelpers

cells_strategy = st.lists(
    st.tuples(st.floats(-10.0, 10.0), st.floats(0.01, 5.0)), min_size=1, max_size=64)


def test_two_cell_instance():
    """Test g, A_k and the constant on v = (1, 0) with unit measures."""
    inst = EstimateTestHelpers.instance([(1.0, 1.0), (0.0, 1.0)])
    assert inst.level_set_measure(0.0) == 1.0
    assert inst.excess(0.25) == pytest.approx(0.75)
    assert inst.hypothesis_constant(2.0) == pytest.approx(1.0)
    assert inst.bound(2.0) == pytest.approx(2.0)


def test_truncation_excess_keeps_sign():
    """Test G_k(v) = v - T_k(v)."""
    inst = StampacchiaInstance([-3.0, 0.5, 2.0], [1.0, 1.0, 1.0])
    assert np.allclose(inst.truncation_excess(1.0), [-2.0, 0.0, 1.0])


def test_weighted_bound_single_cell():
    """Test C (s/(s-1))^s ||rho||_1^(s-1) with C = 1, s = 2."""
    inst = StampacchiaInstance([1.0], [1.0])
    assert inst.weighted_bound(2.0, 1.0) == pytest.approx(4.0)


def test_zero_profile():
    """Test the zero profile has a zero bound."""
    inst = StampacchiaInstance(np.zeros(4), np.ones(4))
    assert inst.hypothesis_constant(2.0) == 0.0
    assert inst.bound(2.0) == 0.0


def test_from_grid_measures(unit_ball_grid):
    """Test volumes or weighted measures are taken from the grid."""
    v = 1.0 - unit_ball_grid.centers ** 2
    plain = StampacchiaInstance.from_grid(unit_ball_grid, v)
    assert plain.total_measure == pytest.approx(unit_ball_grid.volumes.sum())
    weighted = StampacchiaInstance.from_grid(unit_ball_grid, v, weighted=True)
    assert np.array_equal(weighted.measure, unit_ball_grid.weights)


def test_bound_dominates_poisson_solution(unit_ball_grid):
    """Test the bound on (1 - r^2)/6 is at least its maximum."""
    v = (1.0 - unit_ball_grid.centers ** 2) / 6.0
    inst = StampacchiaInstance.from_grid(unit_ball_grid, v)
    assert inst.bound(stampacchia_exponent(3)) >= inst.max_abs


class TestInstanceErrors:
    """Malformed instances."""

    def test_shape_mismatch(self):
        """Test values and measure must have the same shape."""
        with pytest.raises(ParameterError):
            StampacchiaInstance([1.0, 2.0], [1.0])

    def test_nonpositive_measure(self):
        """Test every cell needs positive measure."""
        with pytest.raises(ParameterError):
            StampacchiaInstance([1.0, 2.0], [1.0, 0.0])

    def test_exponent_above_one(self):
        """Test s <= 1 is rejected."""
        with pytest.raises(ParameterError):
            StampacchiaInstance([1.0], [1.0]).hypothesis_constant(1.0)


class TestRandomInstances:
    """Properties over random piecewise-constant profiles."""

    @settings(max_examples=200)
    @given(cells=cells_strategy, s=st.floats(1.1, 3.0))
    def test_bound_dominates_maximum(self, cells, s):
        """Test the bound built from the minimal constant is at least max |v|."""
        inst = EstimateTestHelpers.instance(cells)
        assert inst.bound(s) >= inst.max_abs * (1.0 - 1e-9)

    @settings(max_examples=100)
    @given(cells=cells_strategy, s=st.floats(1.1, 3.0))
    def test_constant_holds_between_levels(self, cells, s):
        """Test g(k) <= C mu(A_k)^s on a fine grid of levels."""
        inst = EstimateTestHelpers.instance(cells)
        c = inst.hypothesis_constant(s)
        for k in np.linspace(0.0, inst.max_abs, 200):
            area = inst.level_set_measure(k)
            if area > 0:
                assert inst.excess(k) <= c * area ** s * (1.0 + 1e-9) + 1e-12

    @settings(max_examples=100)
    @given(cells=cells_strategy, k_bar=st.floats(0.0, 5.0))
    def test_k_bar_floor(self, cells, k_bar):
        """Test the bound never falls below k_bar or max |v|."""
        inst = EstimateTestHelpers.instance(cells)
        bound = inst.bound(2.0, k_bar)
        assert bound >= k_bar
        assert bound >= inst.max_abs * (1.0 - 1e-9)
