"""Montage PNGs for visual review of embedding clusters."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from effsense.cleaning.kmeans import ClusterModel
from effsense.imutil import ImageDecodeError, load_image, resize_uint8


@dataclass(frozen=True)
class MontageResult:
    path: Path
    tiled_ids: tuple[str, ...]
    missing_ids: tuple[str, ...]


def export_cluster_montage(
    model: ClusterModel,
    data: np.ndarray,
    ids: Sequence[str],
    image_paths: Mapping[str, str | Path],
    cluster_id: int,
    out_path: str | Path,
    grid: tuple[int, int] = (4, 4),
    tile_size: int = 64,
) -> MontageResult:
    """Tile the cluster's most central members into one PNG.

    Members are ordered by distance to the centroid (closest first, ties by
    row index) and fill the grid row-major.  A member without a readable
    image file is listed in ``missing_ids`` and its slot stays black; a
    missing image is a review inconvenience, not an error.
    """
    rows, cols = grid
    if rows < 1 or cols < 1:
        raise ValueError("grid must have at least one row and column")
    if tile_size < 1:
        raise ValueError("tile_size must be positive")
    data = np.asarray(data, dtype=np.float64)
    if data.shape[0] != len(ids) or data.shape[0] != model.assignments.shape[0]:
        raise ValueError("data, ids, and model assignments must align")
    members = model.members(cluster_id)
    if members.size == 0:
        raise ValueError(f"cluster {cluster_id} has no members")

    dists = ((data[members] - model.centroids[cluster_id]) ** 2).sum(axis=1)
    order = members[np.argsort(dists, kind="stable")][: rows * cols]

    canvas = np.zeros((rows * tile_size, cols * tile_size, 3), dtype=np.uint8)
    tiled: list[str] = []
    missing: list[str] = []
    for slot, row_index in enumerate(order):
        rid = ids[int(row_index)]
        path = image_paths.get(rid)
        if path is None:
            missing.append(rid)
            continue
        try:
            image = load_image(path)
        except (ImageDecodeError, FileNotFoundError):
            missing.append(rid)
            continue
        tile = resize_uint8(image, tile_size, tile_size)
        r, c = divmod(slot, cols)
        canvas[
            r * tile_size : (r + 1) * tile_size, c * tile_size : (c + 1) * tile_size
        ] = tile
        tiled.append(rid)

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(canvas).save(out_path, format="PNG")
    return MontageResult(
        path=out_path, tiled_ids=tuple(tiled), missing_ids=tuple(missing)
    )
