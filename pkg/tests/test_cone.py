"""Cone element construction, evaluation and exact integration."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hardycone import DecreasingStep, RadialDecreasingStep, power_approximant, random_decreasing
from hardycone.cone import power_step, random_radial


def test_eval_indicator():
    f = DecreasingStep.indicator(1.0)
    assert f.value(0.5) == 1.0
    assert f.value(2.0) == 0.0


def test_eval_two_pieces():
    f = DecreasingStep((1.0, 2.0), (2.0, 1.0))
    assert f.value(1.5) == 1.0
    assert f.value(0.999) == 2.0
    assert f.value(2.0) == 0.0  # right-open on the last piece


def test_eval_rejects_nonpositive():
    f = DecreasingStep.indicator(1.0)
    with pytest.raises(ValueError):
        f.value(0.0)
    with pytest.raises(ValueError):
        f.value(np.array([0.5, -1.0]))


def test_invariants_enforced():
    with pytest.raises(ValueError):
        DecreasingStep((1.0, 2.0), (1.0, 2.0))  # increasing heights
    with pytest.raises(ValueError):
        DecreasingStep((2.0, 1.0), (2.0, 1.0))  # decreasing knots
    with pytest.raises(ValueError):
        DecreasingStep((1.0,), (-0.5,))
    with pytest.raises(ValueError):
        DecreasingStep((), ())


def test_integrate_examples():
    assert DecreasingStep.indicator(1.0).integrate(0.0, 2.0) == 1.0
    f = DecreasingStep((1.0, 2.0), (2.0, 1.0))
    assert f.integrate(0.0, 2.0) == 3.0
    with pytest.raises(ValueError):
        f.integrate(2.0, 1.0)


def test_integrate_matches_quadrature_oracle():
    rng = np.random.default_rng(123)
    for _ in range(5):
        f = random_decreasing(rng, 6)
        top = f.support_max
        expected = quad(lambda x: f.value(x), 0.0, top, points=list(f.knots), limit=200)[0]
        assert abs(f.integrate(0.0, top) - expected) < 1e-12 * max(1.0, expected)


@given(st.floats(0.0, 5.0), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
@settings(max_examples=200)
def test_integrate_additivity(a, b, c):
    a, b, c = sorted((a, b, c))
    f = DecreasingStep((1.0, 2.5, 4.0), (3.0, 1.5, 0.5))
    left = f.integrate(a, b) + f.integrate(b, c)
    assert f.integrate(a, c) == pytest.approx(left, abs=1e-12)


def test_eval_non_increasing():
    rng = np.random.default_rng(7)
    f = random_decreasing(rng, 8)
    xs = np.sort(rng.uniform(1e-3, 2.0 * f.support_max, 200))
    vals = f.value(xs)
    assert np.all(np.diff(vals) <= 0.0)


def test_random_decreasing_deterministic():
    a = random_decreasing(99, 5)
    b = random_decreasing(99, 5)
    assert a == b
    assert a.piece_count == 5


def test_random_decreasing_rejects_bad_ranges():
    with pytest.raises(ValueError):
        random_decreasing(0, 0)
    with pytest.raises(ValueError):
        random_decreasing(0, 3, knot_range=(2.0, 1.0))


def test_random_single_piece_is_indicator_multiple():
    f = random_decreasing(1, 1)
    assert f.piece_count == 1


def test_power_approximant_flat_limit():
    f = power_approximant(1e-12, 16)
    assert np.allclose(f._heights_arr, 1.0, atol=1e-9)
    assert f.support_max == 1.0


def test_power_approximant_validation():
    with pytest.raises(ValueError):
        power_approximant(1.0, 8)
    with pytest.raises(ValueError):
        power_approximant(-0.1, 8)


def test_power_approximant_square_integral_close_to_continuous():
    # minorant of x^-lam, so sum a_i^2 dt_i stays below the exact
    # int_0^1 x^(-2 lam) dx = 10 at lam = 0.45; the deficit is bounded by
    # the per-cell value drops plus the capped mass below the first knot.
    lam = 0.45
    f = power_approximant(lam, 64)
    grid = f._grid
    heights = f._heights_arr
    step_sq = float(np.sum(heights**2 * np.diff(grid)))
    exact = 10.0
    t = grid[1:]
    deficit_cells = np.sum(
        (grid[1:-1] ** (-2 * lam) - t[1:] ** (-2 * lam)) * np.diff(grid)[1:]
    )
    deficit_origin = 9.0 * grid[1] ** (1.0 - 2.0 * lam)
    grid_error = (deficit_cells + deficit_origin) / exact
    assert np.isfinite(step_sq)
    assert step_sq <= exact + 1e-12
    assert step_sq >= exact * (1.0 - grid_error) - 1e-12


def test_power_approximant_gap_bound_on_interior_cells():
    lam = 0.35
    f = power_approximant(lam, 32)
    grid = f._grid
    for i in range(1, f.piece_count):  # cells with positive left endpoint
        lo, hi = grid[i], grid[i + 1]
        xs = np.linspace(lo, hi * (1 - 1e-12), 50)
        gap = np.max(xs ** (-lam) - f.value(xs))
        assert gap <= lo ** (-lam) - hi ** (-lam) + 1e-12


def test_power_step_negative_exponent_still_decreasing():
    f = power_step(-0.5, 8, 0.1, 1.0)  # approximates an increasing power: flipped
    assert np.all(np.diff(f._heights_arr) <= 0.0)


def test_radial_equal_norm_evaluation():
    g = RadialDecreasingStep(3, DecreasingStep((1.0, 2.0), (2.0, 0.5)))
    x = np.array([1.5, 0.0, 0.0])
    y = np.array([0.0, -1.5, 0.0])
    assert g.value_point(x) == g.value_point(y)
    with pytest.raises(ValueError):
        g.value_point(np.array([1.0, 2.0]))


def test_radial_validation_and_random():
    with pytest.raises(ValueError):
        RadialDecreasingStep(0, DecreasingStep.indicator(1.0))
    g = random_radial(5, 3, 4)
    assert g.dimension == 3
    assert g.profile.piece_count == 4


def test_radial_moment_cumulative():
    g = RadialDecreasingStep.ball_indicator(3, 1.0)
    assert g.radial_moment_cumulative(1.0) == pytest.approx(1.0 / 3.0)
    assert g.radial_moment_cumulative(10.0) == pytest.approx(1.0 / 3.0)


def test_serialization_round_trip():
    f = DecreasingStep((1.0, 2.0), (2.0, 1.0))
    assert DecreasingStep.from_dict(f.to_dict()) == f
    g = RadialDecreasingStep(3, f)
    assert RadialDecreasingStep.from_dict(g.to_dict()) == g
