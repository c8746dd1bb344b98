"""Weights, variable exponents and the local oscillation machinery."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from hardycone import (
    DIVERGENT,
    ExponentFunction,
    Weight,
    WeightPiece,
    is_divergent,
    oscillation,
    oscillation_limit,
    oscillation_profile,
    unit_sphere_area,
    vanishing_oscillation_at_origin,
    weight_integral,
)
from hardycone.weights import power_piece_integral


def test_flat_weight_unit_integral():
    assert weight_integral(Weight.power(0.0), 0.0, 1.0) == 1.0


def test_power_integral_matches_quadrature():
    w = Weight.power(0.5)
    mine = weight_integral(w, 0.0, 2.0)
    oracle = quad(lambda x: x**0.5, 0.0, 2.0)[0]
    assert mine == pytest.approx(oracle, abs=1e-10)
    assert mine == pytest.approx(2.0**1.5 / 1.5, rel=1e-14)


def test_divergent_at_origin():
    assert is_divergent(weight_integral(Weight.power(-1.0), 0.0, 1.0))
    assert is_divergent(weight_integral(Weight.power(-1.5), 0.0, 1.0))


def test_divergent_at_infinity():
    assert is_divergent(weight_integral(Weight.power(-1.0), 1.0, math.inf))
    assert weight_integral(Weight.power(-2.0), 1.0, math.inf) == pytest.approx(1.0)


def test_log_piece():
    assert power_piece_integral(1.0, -1.0, 1.0, math.e) == pytest.approx(1.0)


def test_radial_integral_carries_surface_measure():
    w = Weight.power(0.0, dimension=3)
    assert weight_integral(w, 0.0, 1.0) == pytest.approx(4.0 * math.pi / 3.0)
    assert unit_sphere_area(1) == 2.0
    assert unit_sphere_area(2) == pytest.approx(2.0 * math.pi)


def test_piecewise_weight_and_tilt():
    w = Weight(
        (WeightPiece(0.0, 1.0, 2.0, 0.0), WeightPiece(1.0, math.inf, 1.0, -3.0))
    )
    assert w.value(0.5) == 2.0
    assert w.value(2.0) == 0.125
    total = weight_integral(w, 0.0, math.inf)
    assert total == pytest.approx(2.0 + 0.5)
    tilted = w.tilt(1.0)
    assert weight_integral(tilted, 0.0, 1.0) == pytest.approx(1.0)


def test_weight_validation():
    with pytest.raises(ValueError):
        Weight((WeightPiece(0.0, 2.0, 1.0, 0.0), WeightPiece(1.0, 3.0, 1.0, 0.0)))
    with pytest.raises(ValueError):
        WeightPiece(0.0, 1.0, -1.0, 0.0)
    with pytest.raises(ValueError):
        WeightPiece(2.0, 1.0, 1.0, 0.0)


def test_weight_support_is_merged_closure():
    w = Weight((WeightPiece(0.0, 1.0, 1.0, 0.0), WeightPiece(1.0, 2.0, 3.0, 0.0),
                WeightPiece(4.0, 5.0, 1.0, 0.0)))
    assert w.support_intervals() == ((0.0, 2.0), (4.0, 5.0))


def test_exponent_function_basics():
    p = ExponentFunction((1.0,), (2.0, 3.0))
    assert p.value(0.5) == 2.0
    assert p.value(1.0) == 3.0
    assert (p.p_minus, p.p_plus) == (2.0, 3.0)
    assert not p.is_constant
    assert ExponentFunction.constant(2.0).is_constant


def test_exponent_validation():
    with pytest.raises(ValueError):
        ExponentFunction((1.0,), (2.0,))
    with pytest.raises(ValueError):
        ExponentFunction((), (0.0,))
    with pytest.raises(ValueError):
        ExponentFunction((2.0, 1.0), (1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        ExponentFunction.from_intervals([(0.0, 1.0, 2.0), (2.0, math.inf, 3.0)])


def test_exponent_interval_round_trip():
    p = ExponentFunction((1.0, 4.0), (2.0, 2.5, 3.0))
    assert ExponentFunction.from_dict(p.to_dict()) == p


def test_oscillation_constant_exponent_is_zero():
    p = ExponentFunction.constant(2.0)
    w = Weight.power(0.0)
    for d in (0.1, 1.0, 100.0):
        assert oscillation(p, w, d) == 0.0
    assert oscillation_limit(p, w) == 0.0


def test_oscillation_split_exponent():
    p = ExponentFunction((1.0,), (2.0, 3.0))
    w = Weight.power(0.0)
    assert oscillation(p, w, 0.5) == 0.0
    assert oscillation(p, w, 2.0) == 1.0
    assert oscillation_limit(p, w) == 1.0


def test_oscillation_sees_only_the_support():
    # weight supported in (0,1) where the exponent is constant
    p = ExponentFunction((1.0,), (2.0, 3.0))
    w = Weight.power(0.0, support=(0.0, 1.0))
    for d in (0.5, 2.0, 50.0):
        assert oscillation(p, w, d) == 0.0
    assert oscillation_limit(p, w) == 0.0


def test_oscillation_three_values_support_gap():
    p = ExponentFunction((1.0, 2.0), (2.0, 2.5, 3.0))
    w = Weight((WeightPiece(0.0, 1.0, 1.0, 0.0), WeightPiece(2.0, 5.0, 1.0, 0.0)))
    assert oscillation_limit(p, w) == 1.0  # middle value never seen


def test_oscillation_undefined_before_support():
    p = ExponentFunction((1.0,), (2.0, 3.0))
    w = Weight.power(0.0, support=(1.0, math.inf))
    assert oscillation(p, w, 0.5) is None
    with pytest.raises(ValueError):
        oscillation(p, w, 0.0)


def test_oscillation_profile_monotone_and_terminal():
    rng = np.random.default_rng(31)
    for _ in range(10):
        breaks = np.sort(rng.uniform(0.1, 10.0, 3))
        values = rng.uniform(0.5, 4.0, 4)
        p = ExponentFunction(tuple(breaks), tuple(values))
        w = Weight.power(float(rng.uniform(-0.5, 1.0)))
        deltas = np.geomspace(0.01, 100.0, 50)
        prof = oscillation_profile(p, w, deltas)
        defined = [v for v in prof.values if v is not None]
        assert all(b >= a for a, b in zip(defined, defined[1:]))
        beyond = [v for d, v in zip(prof.deltas, prof.values) if d > breaks[-1]]
        assert all(v == prof.terminal for v in beyond)
        assert prof.terminal == oscillation_limit(p, w)


def test_vanishing_oscillation_predicate():
    p = ExponentFunction((1.0,), (2.0, 3.0))
    assert vanishing_oscillation_at_origin(p, Weight.power(0.0))
    assert vanishing_oscillation_at_origin(p, Weight.power(0.0, support=(0.5, 2.0)))
    assert vanishing_oscillation_at_origin(ExponentFunction.constant(2.0), Weight.power(1.0))


def test_weight_serialization_round_trip():
    w = Weight(
        (WeightPiece(0.0, 1.0, 2.0, -0.5), WeightPiece(1.0, math.inf, 1.0, 0.5)),
        dimension=3,
    )
    assert Weight.from_dict(w.to_dict()) == w
