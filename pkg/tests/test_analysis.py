import math

import numpy as np
import pytest
from scipy.optimize import brentq

from percoplanar.analysis import (expected_short_cycles, giant_fixed_point, predicted_giant,
                                  series_identity_check)


def reference_root(c):
    return brentq(lambda x: 1 - math.exp(-c * x) - x, 1e-9, 1.0, xtol=1e-15)


def test_fixed_point_known_value():
    assert giant_fixed_point(2.0) == pytest.approx(0.7968121300, abs=1e-9)
    assert giant_fixed_point(1.5) == pytest.approx(0.5828116, abs=1e-6)


@pytest.mark.parametrize("c", np.linspace(1.01, 10, 25).tolist())
def test_fixed_point_against_brentq(c):
    x = giant_fixed_point(c)
    assert x == pytest.approx(reference_root(c), abs=1e-10)
    assert abs(x - (1 - math.exp(-c * x))) < 2e-12


@pytest.mark.parametrize("c", [0.1, 0.5, 1.0])
def test_fixed_point_subcritical(c):
    assert giant_fixed_point(c) == 0.0


def test_fixed_point_near_threshold():
    eps = 1e-3
    assert giant_fixed_point(1 + eps) / (2 * eps) == pytest.approx(1, rel=0.01)


def test_fixed_point_tolerance_respected():
    for tol in (1e-4, 1e-8):
        assert abs(giant_fixed_point(3.0, tol) - reference_root(3.0)) <= tol


def test_fixed_point_validation():
    for bad in [dict(c=0.0), dict(c=-1.0), dict(c=2.0, tol=0.0)]:
        with pytest.raises(ValueError):
            giant_fixed_point(**bad)


def test_predicted_giant():
    g = predicted_giant(10_000, 1.5)
    assert g.vertices == pytest.approx(5828.1, abs=0.1)
    x = g.vertex_fraction
    assert g.edges == pytest.approx(1.5 * 10_000 * (2 * x - x * x) / 2)
    with pytest.raises(ValueError):
        predicted_giant(100, 1.0)


@pytest.mark.parametrize("x", [1e-6, 0.1, 0.5, 0.9, 0.99])
def test_series_identity_residual(x):
    assert series_identity_check(x) < 1e-9


def test_series_identity_domain():
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            series_identity_check(bad)


def test_expected_short_cycles():
    e = expected_short_cycles(1000, 1.5, 5)
    direct = 1.5 ** 3 / 6 + 1.5 ** 4 / 8 + 1.5 ** 5 / 10
    assert e.refined == pytest.approx(direct)
    assert e.refined == pytest.approx(1.9546875)
    assert e.upper_bound == pytest.approx(5 * 1.5 ** 5)
    assert e.refined <= e.upper_bound


def test_expected_short_cycles_rejects_small_g0():
    with pytest.raises(ValueError):
        expected_short_cycles(100, 1.5, 2)
