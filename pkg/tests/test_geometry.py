"""Polygon validation, area, containment, and the spatial join."""

import numpy as np
import pytest

from effsense.dataset.geometry import (
    AmbiguousJoinError,
    FootprintPolygon,
    footprint_area,
    point_in_polygon,
    polygon_centroid,
    spatial_join,
)

SQUARE = FootprintPolygon(((0, 0), (4, 0), (4, 4), (0, 4)))
TRIANGLE = FootprintPolygon(((0, 0), (6, 0), (0, 3)))
# L-shape: a 4x4 square missing its top-right 2x2 quarter.
L_SHAPE = FootprintPolygon(((0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)))


def test_area_hand_values():
    assert footprint_area(SQUARE) == 16.0
    assert footprint_area(TRIANGLE) == 9.0
    assert footprint_area(L_SHAPE) == 12.0


def test_area_orientation_invariant():
    clockwise = FootprintPolygon(tuple(reversed(SQUARE.ring)))
    assert footprint_area(clockwise) == 16.0


def test_centroid():
    assert polygon_centroid(SQUARE) == (2.0, 2.0)
    cx, cy = polygon_centroid(TRIANGLE)
    assert cx == pytest.approx(2.0)
    assert cy == pytest.approx(1.0)


def test_closed_ring_accepted():
    closed = FootprintPolygon(((0, 0), (1, 0), (1, 1), (0, 1), (0, 0)))
    assert len(closed.ring) == 4


def test_invalid_polygons():
    with pytest.raises(ValueError):
        FootprintPolygon(((0, 0), (1, 1)))  # too few vertices
    with pytest.raises(ValueError):
        FootprintPolygon(((0, 0), (1, 1), (2, 2)))  # collinear, zero area
    with pytest.raises(ValueError):
        FootprintPolygon(((0, 0), (1, 0), (1, 0), (0, 1)))  # duplicate vertex
    with pytest.raises(ValueError):
        FootprintPolygon(((0, 0), (2, 2), (2, 0), (0, 2)))  # bowtie
    with pytest.raises(ValueError):
        FootprintPolygon(((0, 0), (float("nan"), 1), (1, 1)))


def test_point_in_polygon_convex_oracle():
    # Oracle for convex polygons: the point is inside iff it is on the same
    # side of every edge (counter-clockwise ring, strictly positive cross).
    def convex_contains(point, ring):
        x, y = point
        n = len(ring)
        for i in range(n):
            x1, y1 = ring[i]
            x2, y2 = ring[(i + 1) % n]
            if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) <= 0:
                return False
        return True

    rng = np.random.default_rng(42)
    for _ in range(300):
        point = tuple(rng.uniform(-1, 5, size=2))
        assert point_in_polygon(point, SQUARE) == convex_contains(point, SQUARE.ring)
        assert point_in_polygon(point, TRIANGLE) == convex_contains(point, TRIANGLE.ring)


def test_point_in_polygon_concave():
    assert point_in_polygon((1, 1), L_SHAPE)
    assert point_in_polygon((1, 3), L_SHAPE)
    assert not point_in_polygon((3, 3), L_SHAPE)  # the notch
    assert not point_in_polygon((5, 1), L_SHAPE)


def test_spatial_join_basic():
    far_square = FootprintPolygon(((10, 10), (12, 10), (12, 12), (10, 12)))
    join = spatial_join(
        [("a", (1, 1)), ("b", (11, 11)), ("c", (100, 100))],
        [SQUARE, far_square],
    )
    assert join.matched == {"a": 0, "b": 1}
    assert join.unmatched == ("c",)


def test_spatial_join_ambiguity():
    inner = FootprintPolygon(((1, 1), (3, 1), (3, 3), (1, 3)))
    with pytest.raises(AmbiguousJoinError) as excinfo:
        spatial_join([("a", (2, 2))], [SQUARE, inner])
    assert excinfo.value.point_id == "a"
    assert excinfo.value.candidates == (0, 1)


def test_spatial_join_duplicate_ids():
    with pytest.raises(ValueError):
        spatial_join([("a", (1, 1)), ("a", (2, 2))], [SQUARE])
