import math

import numpy as np
import pytest

from spectra_census import regions as rg


def unit2(a, b):
    return rg.unit([a, b])


def test_tube_on_axis_and_outside():
    v = unit2(3, 4)
    spec = rg.TubeSpec(v, 0.5)
    assert rg.in_tube(5 * np.array(v), spec)
    assert not rg.in_tube([50.0, 1.0], spec)
    assert not rg.in_tube([-0.1, 0.1], spec)  # outside the positive chamber


def test_tube_closed_boundary():
    # epsilon is set to the exactly computed distance of a probe point, so
    # membership at distance == epsilon exercises the closed boundary
    v = np.array(unit2(3, 4))
    u0 = np.array([-v[1], v[0]])
    x = 7.0 * v + 0.25 * u0
    resid = x - (x @ v) * v
    dist = float(np.linalg.norm(resid))
    spec = rg.TubeSpec(tuple(v), dist)
    assert rg.in_tube(x, spec)
    below = rg.TubeSpec(tuple(v), np.nextafter(dist, 0.0))
    assert not rg.in_tube(x, below)


def test_tube_offset():
    v = unit2(1, 1)
    spec = rg.TubeSpec(v, 0.3, offset=(2.0, 0.0))
    x = np.array([4.0, 2.0])  # 2*sqrt(2) along v after removing the offset
    assert rg.in_tube(x, spec)
    assert not rg.in_tube([4.0, 0.5], spec)


def test_tube_monotone_in_epsilon():
    rng = np.random.default_rng(3)
    v = unit2(2, 1)
    small = rg.TubeSpec(v, 0.4)
    large = rg.TubeSpec(v, 1.1)
    pts = rng.uniform(0, 8, size=(500, 2))
    for x in pts:
        if rg.in_tube(x, small):
            assert rg.in_tube(x, large)


def test_dimension_mismatch():
    spec = rg.TubeSpec(unit2(1, 1), 0.5)
    with pytest.raises(rg.DimensionMismatch):
        rg.in_tube([1.0, 2.0, 3.0], spec)
    cone = rg.ConeSpec(unit2(1, 1), 0.4)
    with pytest.raises(rg.DimensionMismatch):
        rg.in_cone([1.0], cone)
    box = rg.BoxWindow((0.5, 0.25), (1.0, 1.0), 8.0)
    with pytest.raises(rg.DimensionMismatch):
        rg.in_box_window([1.0], box)


def test_cone_open_boundary():
    v = np.array(unit2(1, 2))
    x = np.array([1.0, 1.0])
    angle = math.acos(float(x @ v) / np.linalg.norm(x))
    exactly = rg.ConeSpec(tuple(v), angle)
    assert not rg.in_cone(x, exactly)  # open condition
    above = rg.ConeSpec(tuple(v), np.nextafter(angle, 4.0))
    assert rg.in_cone(x, above)
    assert rg.in_cone(3 * v, exactly)
    assert not rg.in_cone([0.0, 0.0], exactly)


def test_box_window_corner_closed():
    spec = rg.BoxWindow((0.5, 0.25), (1.0, 0.5), 8.0)  # exact binary corners
    assert rg.in_box_window([4.0, 2.0], spec)
    assert rg.in_box_window([5.0, 2.5], spec)
    assert not rg.in_box_window([np.nextafter(4.0, 0.0), 2.0], spec)
    assert not rg.in_box_window([5.0, np.nextafter(2.5, 3.0)], spec)


def test_box_window_d1_is_interval():
    spec = rg.BoxWindow((1.0,), (0.5,), 3.0)
    assert rg.in_box_window([3.2], spec)
    assert not rg.in_box_window([3.6], spec)
    assert rg.in_box_window([3.0], spec)


def test_truncated_tube_basics():
    upper, lower = rg.box_as_tube_difference(unit2(1, 1.4), (1.0, 1.0), 9.0)
    v = np.array(upper.direction)
    assert rg.in_truncated_tube(4.5 * v, upper)  # 0 is in K
    b0 = upper.truncation(np.zeros(2))
    above = (9.0 + b0 + 1e-6) * v
    assert not rg.in_truncated_tube(above, upper)


def test_truncation_pointwise_monotone():
    # member(lower profile) implies member(higher profile)
    upper, lower = rg.box_as_tube_difference(unit2(1, 1.2), (0.8, 1.3), 7.0)
    rng = np.random.default_rng(12)
    pts = rng.uniform(0, 12, size=(2000, 2))
    for x in pts:
        if rg.in_truncated_tube(x, lower):
            assert rg.in_truncated_tube(x, upper)


def test_box_equals_tube_difference_random_points():
    v = unit2(1, 1.37)
    widths = (0.9, 1.15)
    T = 11.0
    upper, lower = rg.box_as_tube_difference(v, widths, T)
    box = rg.BoxWindow(v, widths, T)
    rng = np.random.default_rng(42)
    # concentrate half the samples near the moving box, rest across the chamber
    near = T * np.array(v) + rng.uniform(-1.5, 2.5, size=(50_000, 2))
    far = rng.uniform(0, 1.6 * T, size=(50_000, 2))
    agreements = 0
    for x in np.vstack([near, far]):
        diff = rg.in_truncated_tube(x, upper) and not rg.in_truncated_tube(x, lower)
        assert diff == rg.in_box_window(x, box)
        agreements += 1
    assert agreements == 100_000


def test_spec_validation():
    with pytest.raises(ValueError):
        rg.TubeSpec((1.0, 1.0), 0.5)  # not unit
    with pytest.raises(ValueError):
        rg.TubeSpec(unit2(1, 1), -0.1)
    with pytest.raises(ValueError):
        rg.ConeSpec(unit2(1, 1), 2.0)  # half-angle past pi/2
    with pytest.raises(ValueError):
        rg.BoxWindow((1.0, -1.0), (1.0, 1.0), 1.0)
    with pytest.raises(ValueError):
        rg.unit([0.0, 0.0])


def test_region_ids_stable():
    tube = rg.TubeSpec(unit2(3, 4), 0.5)
    assert rg.region_id(tube) == rg.region_id(rg.TubeSpec(unit2(3, 4), 0.5))
    assert "tube" in rg.region_id(tube)
