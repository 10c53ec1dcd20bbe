"""Land surface temperature rasters and per-footprint zonal aggregation."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from effsense.dataset.geometry import (
    FootprintPolygon,
    point_in_polygon,
    polygon_centroid,
)


@dataclass(frozen=True)
class LstObservation:
    """One dated LST raster.

    ``grid`` is row-major with row 0 at the bottom of the scene; ``origin``
    is the lower-left corner of the lower-left cell.  The centre of cell
    (row, col) sits at ``origin + cell_size * (col + 0.5, row + 0.5)``.
    NaN cells carry no data.  ``ground_temp`` is the air temperature at
    acquisition time, used to filter out warm-weather scenes.
    """

    grid: np.ndarray
    origin: tuple[float, float]
    cell_size: float
    timestamp: str
    ground_temp: float

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=np.float64)
        if grid.ndim != 2 or grid.size == 0:
            raise ValueError("LST grid must be a non-empty 2-D array")
        if not (self.cell_size > 0):
            raise ValueError("cell size must be positive")
        if not math.isfinite(self.ground_temp):
            raise ValueError("ground temperature must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(
            self, "origin", (float(self.origin[0]), float(self.origin[1]))
        )

    def pixel_center(self, row: int, col: int) -> tuple[float, float]:
        x0, y0 = self.origin
        return (x0 + (col + 0.5) * self.cell_size, y0 + (row + 0.5) * self.cell_size)


def _footprint_samples(
    obs: LstObservation, footprint: FootprintPolygon
) -> list[float]:
    """Raster values for one observation: cells whose centre lies inside the
    footprint, falling back to the single cell centre nearest the footprint
    centroid when none does.  NaN cells are dropped either way."""
    grid = obs.grid
    rows, cols = grid.shape
    x0, y0 = obs.origin
    cs = obs.cell_size
    xmin, ymin, xmax, ymax = footprint.bounds

    # Candidate rows/cols from the footprint bounding box; keeps the
    # containment test away from cells that cannot possibly be inside.
    col_lo = max(0, int(math.floor((xmin - x0) / cs - 0.5)))
    col_hi = min(cols - 1, int(math.ceil((xmax - x0) / cs - 0.5)))
    row_lo = max(0, int(math.floor((ymin - y0) / cs - 0.5)))
    row_hi = min(rows - 1, int(math.ceil((ymax - y0) / cs - 0.5)))

    inside: list[float] = []
    found_center = False
    for row in range(row_lo, row_hi + 1):
        for col in range(col_lo, col_hi + 1):
            if point_in_polygon(obs.pixel_center(row, col), footprint):
                found_center = True
                value = grid[row, col]
                if not math.isnan(value):
                    inside.append(float(value))
    if found_center:
        return inside

    # Tiny footprint: no cell centre fell inside, use the nearest centre.
    cx, cy = polygon_centroid(footprint)
    best: tuple[float, int, int] | None = None
    for row in range(rows):
        for col in range(cols):
            px, py = obs.pixel_center(row, col)
            d2 = (px - cx) ** 2 + (py - cy) ** 2
            if best is None or d2 < best[0]:
                best = (d2, row, col)
    assert best is not None
    value = grid[best[1], best[2]]
    if math.isnan(value):
        return []
    return [float(value)]


def lst_zonal_aggregate(
    observations: Sequence[LstObservation],
    footprint: FootprintPolygon,
    threshold: float = 5.0,
    reducer: str = "mean",
) -> float | None:
    """Aggregate LST over a footprint across cold-weather observations.

    Only observations with ``ground_temp`` strictly below ``threshold``
    (degrees Celsius) contribute.  Samples from all contributing
    observations are pooled and reduced with the mean (default) or median.
    Returns None when no sample survives the filters, which callers record
    as a missing LST value rather than an error.
    """
    if not observations:
        raise ValueError("no LST observations supplied")
    if reducer not in ("mean", "median"):
        raise ValueError(f"unknown reducer {reducer!r}")
    samples: list[float] = []
    for obs in observations:
        if not (obs.ground_temp < threshold):
            continue
        samples.extend(_footprint_samples(obs, footprint))
    if not samples:
        return None
    values = np.asarray(samples, dtype=np.float64)
    if reducer == "mean":
        return float(values.mean())
    return float(np.median(values))
