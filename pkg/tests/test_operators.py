"""The four operators and their sandwich constants."""

import math

import numpy as np
import pytest

from hardycone import (
    DecreasingStep,
    FractionalOrder,
    RadialDecreasingStep,
    ball_average,
    hardy_average,
    random_decreasing,
    random_radial,
    riemann_liouville,
    sandwich_constants,
    truncated_potential,
    truncated_potential_batch,
)
from hardycone.operators import sample_grid

CHI = DecreasingStep.indicator(1.0)


def test_hardy_average_examples():
    assert hardy_average(CHI, 0.5) == 1.0
    assert hardy_average(CHI, 2.0) == 0.5
    f = DecreasingStep((1.0, 2.0), (2.0, 1.0))
    assert hardy_average(f, 2.0) == 1.5


def test_hardy_average_scale_covariance():
    # T(f(lam .))(x) = (Tf)(lam x), exact on steps
    f = DecreasingStep((1.0, 3.0), (2.0, 0.5))
    lam = 2.5
    squeezed = DecreasingStep(tuple(k / lam for k in f.knots), f.heights)
    for x in (0.2, 0.7, 1.9):
        assert hardy_average(squeezed, x) == pytest.approx(hardy_average(f, lam * x), rel=1e-14)


def test_ball_average_examples():
    g = RadialDecreasingStep.ball_indicator(3, 1.0)
    assert ball_average(g, 0.5) == pytest.approx(4.0 * math.pi / 3.0)
    assert ball_average(g, 2.0) == pytest.approx(4.0 * math.pi / 24.0)
    g1 = RadialDecreasingStep.ball_indicator(1, 5.0)
    assert ball_average(g1, 1.0) == pytest.approx(2.0)


def test_riemann_liouville_flat():
    f = DecreasingStep.indicator(10.0)
    for alpha in (0.25, 0.5, 0.75):
        for x in (0.5, 3.0, 10.0 - 1e-9):
            assert riemann_liouville(f, x, alpha) == pytest.approx(1.0 / alpha, rel=1e-12)


def test_riemann_liouville_frozen_value():
    # x^(-1/2) * ((4)^(1/2) - (3)^(1/2)) / (1/2) at x = 4 is 2 - sqrt(3)
    val = riemann_liouville(CHI, 4.0, 0.5)
    assert val == pytest.approx(2.0 - math.sqrt(3.0), abs=1e-14)
    assert val == pytest.approx(0.2679491924311227, abs=1e-13)


def test_riemann_liouville_dominates_hardy_average():
    rng = np.random.default_rng(17)
    for _ in range(10):
        f = random_decreasing(rng, int(rng.integers(1, 7)))
        xs = sample_grid(f)
        for alpha in (0.25, 0.5, 0.75):
            assert np.all(riemann_liouville(f, xs, alpha) >= hardy_average(f, xs) - 1e-12)


def test_riemann_liouville_linearity():
    knots = (1.0, 2.0, 3.0)
    f1 = DecreasingStep(knots, (3.0, 2.0, 1.0))
    f2 = DecreasingStep(knots, (1.0, 1.0, 0.5))
    fsum = DecreasingStep(knots, (4.0, 3.0, 1.5))
    xs = np.array([0.5, 1.5, 2.5, 7.0])
    lhs = riemann_liouville(fsum, xs, 0.5)
    rhs = riemann_liouville(f1, xs, 0.5) + riemann_liouville(f2, xs, 0.5)
    assert np.allclose(lhs, rhs, rtol=1e-14)


def test_fractional_order_validation():
    with pytest.raises(ValueError):
        FractionalOrder(1.0)
    with pytest.raises(ValueError):
        FractionalOrder(3.0, dimension=3)
    FractionalOrder(2.5, dimension=3)
    with pytest.raises(ValueError):
        riemann_liouville(CHI, 1.0, 1.5)


def test_truncated_potential_flat_line():
    g = RadialDecreasingStep.ball_indicator(1, 10.0)
    for alpha in (0.3, 0.5, 0.8):
        val = truncated_potential(g, 2.0, alpha)
        assert val == pytest.approx(2.0**alpha / alpha, rel=1e-10)


def test_truncated_potential_zero_function():
    g = RadialDecreasingStep(3, DecreasingStep((1.0,), (0.0,)))
    assert truncated_potential(g, 0.5, 1.5) == 0.0


def test_potential_dominates_ball_average():
    rng = np.random.default_rng(23)
    for n in (1, 3):
        for _ in range(5):
            g = random_radial(rng, n, int(rng.integers(1, 6)))
            for radius in sample_grid(g)[::5]:
                h = ball_average(g, radius)
                for alpha in (0.4, 0.5 * n):
                    assert truncated_potential(g, float(radius), alpha) >= h - 1e-9 * h


def test_batch_matches_adaptive_route():
    # two independent evaluation paths for the same operator
    rng = np.random.default_rng(5)
    for n in (1, 3):
        g = random_radial(rng, n, 4)
        radii = np.concatenate((sample_grid(g)[::4], [1e4 * g.support_max]))
        for alpha in (0.4, 0.5 * n):
            batch = truncated_potential_batch(g, radii, alpha)
            scalar = np.array([truncated_potential(g, float(r), alpha) for r in radii])
            assert np.allclose(batch, scalar, rtol=3e-8)


def test_batch_generic_dimension_falls_back():
    g = random_radial(2, 2, 3)
    radii = np.array([0.5, 1.0])
    batch = truncated_potential_batch(g, radii, 1.0)
    scalar = np.array([truncated_potential(g, float(r), 1.0) for r in radii])
    assert np.allclose(batch, scalar, rtol=1e-10)


def test_sandwich_constants_fractional_average():
    cst = sandwich_constants("R-vs-T", 0.5)
    assert cst.lower == 1.0
    assert cst.upper == pytest.approx(3.0 * math.sqrt(2.0), rel=1e-14)
    near_one = sandwich_constants("R-vs-T", 1.0 - 1e-9)
    assert near_one.upper == pytest.approx(2.0, rel=1e-6)


def test_sandwich_constants_potential():
    cst = sandwich_constants("I-vs-H", 1.5, 3)
    assert cst.lower == 1.0
    assert cst.upper == pytest.approx(2.0**1.5 + 3 * 8 / 1.5, rel=1e-14)
    # beyond the averaging argument only the coarse kernel bound remains
    high = sandwich_constants("I-vs-H", 2.5, 3)
    assert high.lower == pytest.approx(2.0**-0.5)
    with pytest.raises(ValueError):
        sandwich_constants("I-vs-H", 0.5)
    with pytest.raises(ValueError):
        sandwich_constants("bogus", 0.5)


def test_sample_grid_shape():
    f = DecreasingStep((1.0, 2.0), (2.0, 1.0))
    xs = sample_grid(f)
    assert xs.min() > 0.0
    assert xs.max() == pytest.approx(2.0 * f.support_max)
    for mid in (0.5, 1.5):
        assert np.any(np.isclose(xs, mid))
