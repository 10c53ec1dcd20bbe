"""Planar geometry for building footprints.

Footprints are simple (non-self-intersecting) polygons in a projected
coordinate system, metres on both axes.  Rings are stored without a closing
vertex; orientation does not matter.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

Point = tuple[float, float]


class AmbiguousJoinError(ValueError):
    """A point fell inside more than one footprint."""

    def __init__(self, point_id: str, candidates: Sequence[int]):
        self.point_id = point_id
        self.candidates = tuple(candidates)
        super().__init__(
            f"point {point_id!r} lies inside {len(self.candidates)} footprints: "
            f"{list(self.candidates)}"
        )


def _cross(a: Point, b: Point, c: Point) -> float:
    """Cross product of (b - a) and (c - a)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    """True when collinear point p lies within the bounding box of segment ab."""
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_touch(p1: Point, p2: Point, p3: Point, p4: Point) -> bool:
    """True when segments p1p2 and p3p4 share at least one point."""
    d1 = _cross(p3, p4, p1)
    d2 = _cross(p3, p4, p2)
    d3 = _cross(p1, p2, p3)
    d4 = _cross(p1, p2, p4)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and _on_segment(p3, p4, p1):
        return True
    if d2 == 0 and _on_segment(p3, p4, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, p3):
        return True
    if d4 == 0 and _on_segment(p1, p2, p4):
        return True
    return False


def _signed_area(ring: Sequence[Point]) -> float:
    """Shoelace formula; positive for counter-clockwise rings."""
    acc = 0.0
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        acc += x1 * y2 - x2 * y1
    return acc / 2.0


@dataclass(frozen=True)
class FootprintPolygon:
    """A validated simple polygon with strictly positive area."""

    ring: tuple[Point, ...]

    def __post_init__(self) -> None:
        points = [(float(x), float(y)) for x, y in self.ring]
        if len(points) >= 2 and points[0] == points[-1]:
            points = points[:-1]  # accept GeoJSON-style closed rings
        object.__setattr__(self, "ring", tuple(points))
        self._validate()

    def _validate(self) -> None:
        ring = self.ring
        n = len(ring)
        if n < 3:
            raise ValueError(f"polygon needs at least 3 distinct vertices, got {n}")
        for x, y in ring:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("polygon vertices must be finite")
        if len(set(ring)) != n:
            raise ValueError("polygon has duplicate vertices")
        if _signed_area(ring) == 0.0:
            raise ValueError("polygon has zero area")
        # Adjacent edges share one vertex; reject the degenerate spike where
        # the outgoing edge folds straight back along the incoming one.
        for i in range(n):
            prev_pt = ring[i - 1]
            vert = ring[i]
            next_pt = ring[(i + 1) % n]
            if _cross(vert, prev_pt, next_pt) == 0.0:
                dot = (prev_pt[0] - vert[0]) * (next_pt[0] - vert[0]) + (
                    prev_pt[1] - vert[1]
                ) * (next_pt[1] - vert[1])
                if dot > 0:
                    raise ValueError("polygon has a degenerate spike vertex")
        # Non-adjacent edge pairs may not meet at all.
        for i in range(n):
            a1, a2 = ring[i], ring[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                b1, b2 = ring[j], ring[(j + 1) % n]
                if _segments_touch(a1, a2, b1, b2):
                    raise ValueError("polygon is self-intersecting")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        xs = [p[0] for p in self.ring]
        ys = [p[1] for p in self.ring]
        return (min(xs), min(ys), max(xs), max(ys))


def footprint_area(polygon: FootprintPolygon) -> float:
    """Unsigned polygon area in square metres (shoelace formula)."""
    area = abs(_signed_area(polygon.ring))
    if area == 0.0:
        raise ValueError("polygon has zero area")
    return area


def polygon_centroid(polygon: FootprintPolygon) -> Point:
    """Area-weighted centroid of the polygon."""
    ring = polygon.ring
    n = len(ring)
    a = _signed_area(ring)
    cx = 0.0
    cy = 0.0
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        w = x1 * y2 - x2 * y1
        cx += (x1 + x2) * w
        cy += (y1 + y2) * w
    return (cx / (6.0 * a), cy / (6.0 * a))


def point_in_polygon(point: Sequence[float], polygon: FootprintPolygon) -> bool:
    """Even-odd crossing test.

    Points exactly on the boundary are half-open edge cases; callers should
    not rely on either outcome for them.
    """
    x, y = float(point[0]), float(point[1])
    ring = polygon.ring
    n = len(ring)
    inside = False
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            t = (y - y1) / (y2 - y1)
            crossing_x = x1 + t * (x2 - x1)
            if x < crossing_x:
                inside = not inside
    return inside


@dataclass(frozen=True)
class JoinResult:
    """Outcome of joining labelled points onto footprints.

    ``matched`` maps point id to the index of its containing footprint;
    ``unmatched`` lists point ids that fell inside no footprint.
    """

    matched: dict[str, int]
    unmatched: tuple[str, ...]


def spatial_join(
    points: Sequence[tuple[str, Sequence[float]]],
    footprints: Sequence[FootprintPolygon],
) -> JoinResult:
    """Assign each labelled point to the footprint that contains it.

    A point inside more than one footprint raises AmbiguousJoinError listing
    every candidate, since overlapping footprints mean the source data is
    inconsistent.
    """
    seen: set[str] = set()
    matched: dict[str, int] = {}
    unmatched: list[str] = []
    for point_id, xy in points:
        if point_id in seen:
            raise ValueError(f"duplicate point id {point_id!r}")
        seen.add(point_id)
        candidates = [
            idx for idx, poly in enumerate(footprints) if point_in_polygon(xy, poly)
        ]
        if len(candidates) > 1:
            raise AmbiguousJoinError(point_id, candidates)
        if candidates:
            matched[point_id] = candidates[0]
        else:
            unmatched.append(point_id)
    return JoinResult(matched=matched, unmatched=tuple(unmatched))
