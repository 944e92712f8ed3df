import math

import pytest
from hypothesis import given, strategies as st

from rssiloc.geometry import (
    AnchorNode,
    Point2D,
    Rect,
    dbm_to_milliwatts,
    euclidean_distance,
    milliwatts_to_dbm,
)

coord = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
points = st.builds(Point2D, coord, coord)


def test_distance_identity():
    assert euclidean_distance(Point2D(0, 0), Point2D(0, 0)) == 0.0


def test_distance_pythagorean_triple():
    assert euclidean_distance(Point2D(0, 0), Point2D(3, 4)) == 5.0


def test_distance_hand_value():
    # sqrt(15^2 + 30^2) = sqrt(1125)
    assert euclidean_distance(Point2D(0, 0), Point2D(15, 30)) == pytest.approx(
        33.54101966249684, abs=1e-5
    )


@given(points, points)
def test_distance_symmetric_nonnegative(a, b):
    d = euclidean_distance(a, b)
    assert d >= 0.0
    assert d == euclidean_distance(b, a)


@given(points, points, points)
def test_triangle_inequality(a, b, c):
    assert euclidean_distance(a, c) <= (
        euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-9
    )


def test_dbm_definitions():
    assert dbm_to_milliwatts(0.0) == 1.0
    assert dbm_to_milliwatts(-30.0) == pytest.approx(0.001, rel=1e-12)


def test_dbm_round_trip_example():
    assert dbm_to_milliwatts(milliwatts_to_dbm(2.5)) == pytest.approx(2.5, rel=1e-12)


@given(st.floats(min_value=1e-12, max_value=1e3, allow_nan=False))
def test_dbm_round_trip_property(mw):
    assert dbm_to_milliwatts(milliwatts_to_dbm(mw)) == pytest.approx(mw, rel=1e-12)


@pytest.mark.parametrize("mw", [0.0, -1.0, -1e-9])
def test_nonpositive_milliwatts_rejected(mw):
    with pytest.raises(ValueError):
        milliwatts_to_dbm(mw)


@pytest.mark.parametrize("x,y", [(math.nan, 0), (0, math.inf), (-math.inf, 1)])
def test_nonfinite_point_rejected(x, y):
    with pytest.raises(ValueError):
        Point2D(x, y)


def test_negative_node_id_rejected():
    with pytest.raises(ValueError):
        AnchorNode(-1, Point2D(0, 0))


def test_rect_basics():
    r = Rect(0, 0, 30, 20)
    assert r.width == 30 and r.height == 20
    assert r.contains(Point2D(30, 20))
    assert not r.contains(Point2D(30.1, 20))
    with pytest.raises(ValueError):
        Rect(1, 0, 0, 5)
