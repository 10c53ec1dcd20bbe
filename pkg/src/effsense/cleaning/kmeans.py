"""Lloyd's K-Means with deterministic seeding and tie-breaking.

One iteration is an assignment step (nearest centroid, ties to the lowest
cluster index) followed by an update step (cluster means; an emptied
cluster is re-seeded with the point farthest from its own new centroid).
The recorded objective is the within-cluster sum of squared distances
after each update, which is non-increasing by the usual argument: the
assignment step cannot increase it against the old centroids, and the
mean minimizes it for a fixed assignment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from effsense.dataset.embeddings import EmbeddingMatrix, read_embeddings, write_embeddings
from effsense.dataset.ingest import write_json


@dataclass(frozen=True)
class ClusterModel:
    """Fitted K-Means state.

    ``objective`` equals the recomputed sum over points of the squared
    distance to their assigned centroid; ``objective_history`` holds the
    per-iteration values, one per completed assign+update cycle.
    """

    k: int
    centroids: np.ndarray
    assignments: np.ndarray
    objective: float
    seed: int
    iterations_run: int
    objective_history: tuple[float, ...]

    def members(self, cluster_id: int) -> np.ndarray:
        if not (0 <= cluster_id < self.k):
            raise ValueError(f"cluster id {cluster_id} out of range [0, {self.k})")
        return np.flatnonzero(self.assignments == cluster_id)


def _squared_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(N, k) squared Euclidean distances, clamped at zero."""
    d2 = (
        (x * x).sum(axis=1)[:, None]
        + (centroids * centroids).sum(axis=1)[None, :]
        - 2.0 * (x @ centroids.T)
    )
    return np.maximum(d2, 0.0)


def _objective(x: np.ndarray, centroids: np.ndarray, assign: np.ndarray) -> float:
    diffs = x - centroids[assign]
    return float((diffs * diffs).sum())


def kmeans(
    x: np.ndarray, k: int, seed: int, max_iter: int = 100
) -> ClusterModel:
    """Cluster rows of ``x`` into ``k`` groups.

    Initial centroids are ``k`` rows sampled without replacement by a
    seeded generator.  Iteration stops at the assignment fixpoint or after
    ``max_iter`` cycles, whichever comes first.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("data must be a non-empty (N, d) matrix")
    if not np.isfinite(x).all():
        raise ValueError("data must be finite")
    n = x.shape[0]
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")

    rng = np.random.default_rng(seed)
    centroids = x[rng.choice(n, size=k, replace=False)].copy()

    history: list[float] = []
    prev_assign: np.ndarray | None = None
    assign = np.zeros(n, dtype=np.int64)
    iterations = 0
    for _ in range(max_iter):
        assign = np.argmin(_squared_distances(x, centroids), axis=1)
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        # Update: means of members; empty clusters re-seed at the point
        # farthest from its own new centroid (first such point on ties).
        new_centroids = centroids.copy()
        empty: list[int] = []
        for j in range(k):
            members = assign == j
            if members.any():
                new_centroids[j] = x[members].mean(axis=0)
            else:
                empty.append(j)
        if empty:
            dist_own = ((x - new_centroids[assign]) ** 2).sum(axis=1)
            candidates = np.argsort(-dist_own, kind="stable")  # ties: lowest index
            taken: set[int] = set()
            for j in empty:
                pick = next(int(c) for c in candidates if int(c) not in taken)
                taken.add(pick)
                new_centroids[j] = x[pick]
        centroids = new_centroids
        prev_assign = assign
        iterations += 1
        history.append(_objective(x, centroids, assign))

    final_objective = _objective(x, centroids, assign)
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments=assign,
        objective=final_objective,
        seed=int(seed),
        iterations_run=iterations,
        objective_history=tuple(history),
    )


def save_cluster_model(model: ClusterModel, directory: str | Path) -> Path:
    """Write cluster_model.json plus the centroid matrix as EMB1."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    matrix = EmbeddingMatrix(
        ids=tuple(f"c{j}" for j in range(model.k)),
        data=model.centroids.astype(np.float32),
    )
    write_embeddings(matrix, directory / "centroids.emb")
    doc = {
        "k": model.k,
        "seed": model.seed,
        "objective": model.objective,
        "iterations_run": model.iterations_run,
        "objective_history": list(model.objective_history),
        "assignments": [int(a) for a in model.assignments],
        "centroids_file": "centroids.emb",
    }
    path = directory / "cluster_model.json"
    write_json(path, doc)
    return path


def load_cluster_model(directory: str | Path) -> ClusterModel:
    directory = Path(directory)
    doc = json.loads((directory / "cluster_model.json").read_text(encoding="utf-8"))
    matrix = read_embeddings(directory / doc["centroids_file"])
    return ClusterModel(
        k=int(doc["k"]),
        centroids=matrix.data.astype(np.float64),
        assignments=np.asarray(doc["assignments"], dtype=np.int64),
        objective=float(doc["objective"]),
        seed=int(doc["seed"]),
        iterations_run=int(doc["iterations_run"]),
        objective_history=tuple(doc["objective_history"]),
    )
