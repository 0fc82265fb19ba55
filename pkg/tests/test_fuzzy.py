import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzstat import (
    DEFAULT_GRID,
    AlphaGrid,
    FuzzyNumber,
    GridMismatchError,
    InvalidFuzzyNumber,
    add,
    crisp,
    metric_d,
    scale,
    triangular,
)

from conftest import fuzzy_numbers

DYADIC_SCALARS = st.sampled_from([-4.0, -3.0, -2.0, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0])


def closed_form_tri(a, b, c, grid=DEFAULT_GRID):
    alpha = grid.levels
    return a + alpha * (b - a), c - alpha * (c - b)


def nested(x: FuzzyNumber) -> bool:
    return bool(np.all(np.diff(x.lower) >= 0) and np.all(np.diff(x.upper) <= 0) and np.all(x.lower <= x.upper))


class TestGrid:
    def test_uniform_default(self):
        assert DEFAULT_GRID.resolution == 257
        assert DEFAULT_GRID.levels[0] == 0.0 and DEFAULT_GRID.levels[-1] == 1.0

    @pytest.mark.parametrize("levels", [[0.0], [0.0, 0.5, 0.5, 1.0], [0.1, 1.0], [0.0, 0.9]])
    def test_rejects_bad_levels(self, levels):
        with pytest.raises(ValueError):
            AlphaGrid(levels)

    def test_levels_are_readonly(self):
        with pytest.raises(ValueError):
            DEFAULT_GRID.levels[0] = 0.5

    def test_equality_by_value(self):
        assert AlphaGrid.uniform(9) == AlphaGrid(np.linspace(0, 1, 9))
        assert AlphaGrid.uniform(9) != AlphaGrid.uniform(17)


class TestConstruction:
    def test_crisp_cuts(self):
        for r in (0.0, 1.0):
            x = crisp(r)
            assert np.all(x.lower == r) and np.all(x.upper == r)
            assert x.is_crisp

    def test_crisp_rejects_nan(self):
        with pytest.raises(InvalidFuzzyNumber):
            crisp(float("nan"))

    def test_triangular_closed_form(self):
        x = triangular(0, 1, 2)
        lo, hi = closed_form_tri(0, 1, 2)
        assert np.array_equal(x.lower, lo) and np.array_equal(x.upper, hi)
        assert x.core == (1.0, 1.0) and x.support == (0.0, 2.0)

    def test_empty_cut_reports_level(self):
        g = AlphaGrid.uniform(3)
        with pytest.raises(InvalidFuzzyNumber, match="level index 2"):
            FuzzyNumber(g, [0, 0, 2], [3, 3, 1])

    def test_non_nested_lower(self):
        g = AlphaGrid.uniform(3)
        with pytest.raises(InvalidFuzzyNumber, match="lower endpoint decreases at level index 1"):
            FuzzyNumber(g, [0, -1, 0], [3, 3, 3])

    def test_non_nested_upper(self):
        g = AlphaGrid.uniform(3)
        with pytest.raises(InvalidFuzzyNumber, match="upper endpoint increases"):
            FuzzyNumber(g, [0, 0, 0], [3, 2, 3])

    def test_wrong_shape_and_nonfinite(self):
        g = AlphaGrid.uniform(3)
        with pytest.raises(InvalidFuzzyNumber):
            FuzzyNumber(g, [0, 0], [1, 1])
        with pytest.raises(InvalidFuzzyNumber):
            FuzzyNumber(g, [0, 0, 0], [1, 1, np.inf])

    def test_values_are_immutable(self):
        x = triangular(0, 1, 2)
        with pytest.raises(ValueError):
            x.lower[0] = 5.0


class TestArithmetic:
    def test_add_crisp(self):
        assert add(crisp(1), crisp(2)) == crisp(3)

    def test_add_identity(self):
        x = triangular(-1, 0.5, 4)
        assert add(x, crisp(0)) == x

    def test_add_triangles(self):
        lo, hi = closed_form_tri(1, 3, 5)
        s = triangular(0, 1, 2) + triangular(1, 2, 3)
        np.testing.assert_allclose(s.lower, lo, rtol=0, atol=1e-15)
        np.testing.assert_allclose(s.upper, hi, rtol=0, atol=1e-15)

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatchError):
            add(crisp(1, AlphaGrid.uniform(5)), crisp(1))
        with pytest.raises(GridMismatchError):
            metric_d(crisp(1, AlphaGrid.uniform(5)), crisp(1))

    def test_scale_identity(self):
        x = triangular(-1, 0.5, 4)
        assert scale(1, x) == x

    def test_scale_negative_swaps(self):
        assert scale(-1, triangular(0, 1, 2)) == triangular(-2, -1, 0)
        assert -triangular(0, 1, 2) == triangular(-2, -1, 0)

    def test_scale_zero_is_crisp_zero(self):
        z = scale(0, triangular(-1, 0, 3))
        assert z == crisp(0)
        assert not np.any(np.signbit(z.lower)) and not np.any(np.signbit(z.upper))

    def test_scale_rejects_inf(self):
        with pytest.raises(ValueError):
            scale(float("inf"), crisp(1))


class TestMetric:
    def test_examples(self):
        x = triangular(0, 1, 2)
        assert metric_d(x, x) == 0.0
        assert metric_d(crisp(1), crisp(0)) == 1.0
        assert metric_d(crisp(2.5), crisp(-1)) == 3.5
        assert metric_d(triangular(0, 1, 2), triangular(1, 2, 3)) == 1.0

    def test_dense_brute_force(self):
        # sup over a fine alpha mesh of the closed-form endpoint gaps
        a = np.linspace(0, 1, 100_001)
        gap = np.maximum(np.abs((0 + a) - (1 + a * 0.5)), np.abs((3 - a * 2) - (2 - a * 0.5)))
        x, y = triangular(0, 1, 3), triangular(1, 1.5, 2)
        assert metric_d(x, y) == pytest.approx(gap.max(), abs=1e-12)

    def test_scale_minus_three(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a, b = np.sort(rng.normal(size=3)), np.sort(rng.normal(size=3))
            x, y = triangular(*a), triangular(*b)
            assert metric_d(scale(-3, x), scale(-3, y)) == pytest.approx(3 * metric_d(x, y), rel=1e-14)


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers())
    def test_metric_axioms(self, x, y, z):
        assert metric_d(x, y) >= 0
        assert metric_d(x, y) == metric_d(y, x)
        assert (metric_d(x, y) == 0) == (x == y)
        assert metric_d(x, z) <= metric_d(x, y) + metric_d(y, z) + 1e-12

    @settings(max_examples=200, deadline=None)
    @given(fuzzy_numbers(), fuzzy_numbers(), DYADIC_SCALARS)
    def test_scalar_property_exact(self, x, y, c):
        assert metric_d(scale(c, x), scale(c, y)) == abs(c) * metric_d(x, y)

    @settings(max_examples=200, deadline=None)
    @given(fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers())
    def test_translation_property_exact(self, x, y, z):
        assert metric_d(add(x, z), add(y, z)) == metric_d(x, y)

    @settings(max_examples=200, deadline=None)
    @given(fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers(), fuzzy_numbers())
    def test_subadditivity(self, x, y, z, w):
        assert metric_d(add(x, z), add(y, w)) <= metric_d(x, y) + metric_d(z, w) + 1e-12

    @settings(max_examples=100, deadline=None)
    @given(fuzzy_numbers(), fuzzy_numbers(), st.floats(-1e3, 1e3))
    def test_nestedness_preserved(self, x, y, c):
        assert nested(add(x, y))
        assert nested(scale(c, x))

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.floats(-5, 5),
    )
    def test_float_valued_scalar_property(self, a, b, c):
        x, y = triangular(*sorted(a)), triangular(*sorted(b))
        assert metric_d(scale(c, x), scale(c, y)) == pytest.approx(abs(c) * metric_d(x, y), rel=1e-12, abs=1e-12)


class TestSerialization:
    @settings(max_examples=50, deadline=None)
    @given(fuzzy_numbers())
    def test_json_round_trip(self, x):
        assert FuzzyNumber.from_json(x.to_json()) == x

    def test_round_trip_awkward_floats(self):
        x = triangular(0.1, 1 / 3, np.pi)
        back = FuzzyNumber.from_json(x.to_json())
        assert np.array_equal(back.lower, x.lower) and np.array_equal(back.upper, x.upper)

    def test_schema_keys(self):
        data = json.loads(crisp(2, AlphaGrid.uniform(3)).to_json())
        assert data == {"levels": [0.0, 0.5, 1.0], "lower": [2.0, 2.0, 2.0], "upper": [2.0, 2.0, 2.0]}
