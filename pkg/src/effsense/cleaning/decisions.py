"""Reviewer decisions over clusters and their application to the dataset.

After inspecting montages, a reviewer records one verdict per cluster in a
CSV with header ``cluster_id,verdict,override_ids``.  The verdict is
``keep`` or ``drop``; ``override_ids`` optionally flips individual
records, ``|``-separated, each prefixed ``+`` (keep despite a dropped
cluster) or ``-`` (drop despite a kept cluster).
"""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from effsense.cleaning.kmeans import ClusterModel

DECISIONS_HEADER = ["cluster_id", "verdict", "override_ids"]


@dataclass(frozen=True)
class CleaningDecision:
    cluster_id: int
    verdict: str
    keep_ids: tuple[str, ...] = ()
    drop_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.verdict not in ("keep", "drop"):
            raise ValueError(f"verdict must be keep or drop, got {self.verdict!r}")
        if self.cluster_id < 0:
            raise ValueError("cluster_id must be non-negative")
        overlap = set(self.keep_ids) & set(self.drop_ids)
        if overlap:
            raise ValueError(f"ids both kept and dropped: {sorted(overlap)}")


@dataclass(frozen=True)
class RemovedRecord:
    id: str
    cluster_id: int
    reason: str  # "cluster-drop" or "override-drop"


@dataclass(frozen=True)
class RemovalReport:
    removed: tuple[RemovedRecord, ...]

    @property
    def removed_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.removed)


def apply_cleaning_decisions(
    ids: Sequence[str],
    model: ClusterModel,
    decisions: Sequence[CleaningDecision],
) -> tuple[list[str], RemovalReport]:
    """Filter ``ids`` (aligned with the model's rows) by the decisions.

    Decisions must cover every cluster exactly once, and each override id
    must belong to the cluster whose row names it; both guard against a
    decisions file written for a different clustering.  Returns the kept
    ids in their original order plus a report of every removal.
    """
    if len(ids) != model.assignments.shape[0]:
        raise ValueError(
            f"{len(ids)} ids for {model.assignments.shape[0]} clustered rows"
        )
    by_cluster: dict[int, CleaningDecision] = {}
    for decision in decisions:
        if decision.cluster_id >= model.k:
            raise ValueError(
                f"decision for cluster {decision.cluster_id}, model has k={model.k}"
            )
        if decision.cluster_id in by_cluster:
            raise ValueError(f"duplicate decision for cluster {decision.cluster_id}")
        by_cluster[decision.cluster_id] = decision
    missing = sorted(set(range(model.k)) - set(by_cluster))
    if missing:
        raise ValueError(f"no decision for clusters {missing}")

    cluster_of = {rid: int(c) for rid, c in zip(ids, model.assignments)}
    for decision in decisions:
        for rid in (*decision.keep_ids, *decision.drop_ids):
            if rid not in cluster_of:
                raise ValueError(f"override id {rid!r} is not in the dataset")
            if cluster_of[rid] != decision.cluster_id:
                raise ValueError(
                    f"override id {rid!r} is in cluster {cluster_of[rid]}, "
                    f"not {decision.cluster_id}"
                )

    kept: list[str] = []
    removed: list[RemovedRecord] = []
    for rid in ids:
        cluster = cluster_of[rid]
        decision = by_cluster[cluster]
        if decision.verdict == "drop":
            if rid in decision.keep_ids:
                kept.append(rid)
            else:
                removed.append(RemovedRecord(rid, cluster, "cluster-drop"))
        else:
            if rid in decision.drop_ids:
                removed.append(RemovedRecord(rid, cluster, "override-drop"))
            else:
                kept.append(rid)
    return kept, RemovalReport(removed=tuple(removed))


def write_decisions_template(model: ClusterModel, path: str | Path) -> None:
    """Write a keep-everything template with one row per cluster."""
    path = Path(path)
    lines = [",".join(DECISIONS_HEADER)]
    for cluster_id in range(model.k):
        lines.append(f"{cluster_id},keep,")
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")


def read_decisions(path: str | Path) -> list[CleaningDecision]:
    """Parse a decisions CSV."""
    path = Path(path)
    decisions: list[CleaningDecision] = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty decisions file") from None
        if header != DECISIONS_HEADER:
            raise ValueError(
                f"{path}: bad header {header!r}, expected {DECISIONS_HEADER!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields")
            cluster_text, verdict, overrides_text = row
            keep_ids: list[str] = []
            drop_ids: list[str] = []
            for token in overrides_text.split("|"):
                token = token.strip()
                if not token:
                    continue
                if token.startswith("+"):
                    keep_ids.append(token[1:])
                elif token.startswith("-"):
                    drop_ids.append(token[1:])
                else:
                    raise ValueError(
                        f"{path}:{lineno}: override {token!r} must start with + or -"
                    )
            decisions.append(
                CleaningDecision(
                    cluster_id=int(cluster_text),
                    verdict=verdict.strip(),
                    keep_ids=tuple(keep_ids),
                    drop_ids=tuple(drop_ids),
                )
            )
    return decisions
