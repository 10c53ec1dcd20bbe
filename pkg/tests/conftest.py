"""Shared fixtures: record and bundle factories for compact test datasets."""

import numpy as np

from effsense.dataset.embeddings import EmbeddingMatrix
from effsense.dataset.geometry import FootprintPolygon
from effsense.dataset.ingest import DatasetBundle
from effsense.dataset.records import BuildingRecord, build_record
from effsense.dataset.split import split_dataset
from effsense.dataset.types import EfficiencyLabel, FeatureChannel


def make_record(
    record_id: str,
    geography: str = "leeds",
    grade: str = "C",
    centroid: tuple[float, float] = (5.0, 5.0),
    side: float = 4.0,
    lst_value: float | None = None,
    energy_consumption: float | None = None,
    embedding_refs=None,
) -> BuildingRecord:
    cx, cy = centroid
    h = side / 2
    footprint = FootprintPolygon(
        ((cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h))
    )
    return build_record(
        record_id,
        geography,
        centroid,
        footprint,
        [EfficiencyLabel.from_string(grade)],
        lst_value=lst_value,
        energy_consumption=energy_consumption,
        embedding_refs=embedding_refs,
    )


def separable_bundle(n=40, dim=4, seed=0, efficient_share=0.5):
    """A bundle whose SV embeddings and LST values both separate the classes."""
    rng = np.random.default_rng(seed)
    n_eff = int(round(n * efficient_share))
    records = []
    vectors = []
    for i in range(n):
        efficient = i < n_eff
        grade = "B" if efficient else "F"
        center = -1.0 if efficient else 1.0
        vectors.append(rng.normal(center, 0.3, size=dim))
        records.append(
            make_record(
                f"t{i:03d}",
                grade=grade,
                centroid=(float(i * 10), 0.0),
                lst_value=8.0 + (2.0 if efficient else -2.0) + rng.normal(0, 0.3),
                embedding_refs={FeatureChannel.SV: i},
            )
        )
    emb = EmbeddingMatrix(
        ids=tuple(r.id for r in records),
        data=np.asarray(vectors, dtype=np.float32),
        channel=FeatureChannel.SV,
    )
    split = split_dataset(records, seed=1, counts=(n - 12, 6, 6))
    return DatasetBundle(
        records=tuple(records), embeddings={FeatureChannel.SV: emb}, split=split
    )
