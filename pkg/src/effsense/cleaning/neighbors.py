"""Brute-force nearest-neighbour lookup in embedding space."""

from __future__ import annotations

import numpy as np


def nearest_neighbors(
    query: np.ndarray, data: np.ndarray, k: int, metric: str = "euclidean"
) -> list[tuple[int, float]]:
    """The k rows of ``data`` closest to ``query``, as (index, distance).

    Results are ordered by increasing distance; equal distances order by
    row index.  Only the Euclidean metric is supported.
    """
    if metric != "euclidean":
        raise ValueError(f"unsupported metric {metric!r}")
    data = np.asarray(data, dtype=np.float64)
    query = np.asarray(query, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError("data must be a non-empty (N, d) matrix")
    if query.shape != (data.shape[1],):
        raise ValueError(
            f"query dimension {query.shape} does not match data dimension {data.shape[1]}"
        )
    if not (1 <= k <= data.shape[0]):
        raise ValueError(f"k must be in [1, {data.shape[0]}], got {k}")
    dists = np.sqrt(((data - query) ** 2).sum(axis=1))
    order = np.argsort(dists, kind="stable")[:k]
    return [(int(i), float(dists[i])) for i in order]
