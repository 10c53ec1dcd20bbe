"""Readers for the exchange formats and dataset bundle assembly.

Three source files describe a dataset: a records manifest (CSV), a
footprint collection (GeoJSON), and zero or more LST rasters (ASCII
grids).  ``assemble_dataset`` joins them into BuildingRecords;
``DatasetBundle`` adds embedding matrices and an optional split, and can
round-trip through a directory.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from effsense.dataset.embeddings import (
    EmbeddingMatrix,
    read_embeddings,
    write_embeddings,
)
from effsense.dataset.geometry import FootprintPolygon, spatial_join
from effsense.dataset.lst import LstObservation, lst_zonal_aggregate
from effsense.dataset.records import BuildingRecord, build_record
from effsense.dataset.split import DatasetSplit
from effsense.dataset.types import EfficiencyLabel, FeatureChannel

MANIFEST_HEADER = ["id", "geography", "x", "y", "label_units", "energy_consumption"]


@dataclass(frozen=True)
class ManifestRow:
    id: str
    geography: str
    x: float
    y: float
    unit_labels: tuple[EfficiencyLabel, ...]
    energy_consumption: float | None


def read_manifest(path: str | Path) -> list[ManifestRow]:
    """Read the records manifest CSV.

    ``label_units`` holds one or more ``|``-separated EPC grades;
    ``energy_consumption`` may be empty.
    """
    path = Path(path)
    rows: list[ManifestRow] = []
    seen: set[str] = set()
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty manifest") from None
        if header != MANIFEST_HEADER:
            raise ValueError(
                f"{path}: bad manifest header {header!r}, expected {MANIFEST_HEADER!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(MANIFEST_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(MANIFEST_HEADER)} fields")
            rid, geography, x, y, units_text, energy_text = row
            if not rid:
                raise ValueError(f"{path}:{lineno}: empty id")
            if rid in seen:
                raise ValueError(f"{path}:{lineno}: duplicate id {rid!r}")
            seen.add(rid)
            units = tuple(
                EfficiencyLabel.from_string(u) for u in units_text.split("|") if u
            )
            if not units:
                raise ValueError(f"{path}:{lineno}: no unit grades for {rid!r}")
            energy = float(energy_text) if energy_text.strip() else None
            if energy is not None and not math.isfinite(energy):
                raise ValueError(f"{path}:{lineno}: non-finite energy consumption")
            rows.append(
                ManifestRow(
                    id=rid,
                    geography=geography,
                    x=float(x),
                    y=float(y),
                    unit_labels=units,
                    energy_consumption=energy,
                )
            )
    return rows


def read_footprints(path: str | Path) -> tuple[list[str], list[FootprintPolygon]]:
    """Read footprints from a GeoJSON FeatureCollection.

    Every feature must be a simple Polygon (no holes, no MultiPolygon) with
    a unique ``id`` property.
    """
    path = Path(path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    if doc.get("type") != "FeatureCollection":
        raise ValueError(f"{path}: expected a FeatureCollection")
    ids: list[str] = []
    polygons: list[FootprintPolygon] = []
    for i, feature in enumerate(doc.get("features", [])):
        props = feature.get("properties") or {}
        fid = props.get("id")
        if not fid:
            raise ValueError(f"{path}: feature {i} has no id property")
        fid = str(fid)
        if fid in ids:
            raise ValueError(f"{path}: duplicate footprint id {fid!r}")
        geometry = feature.get("geometry") or {}
        if geometry.get("type") != "Polygon":
            raise ValueError(
                f"{path}: footprint {fid!r} has geometry "
                f"{geometry.get('type')!r}, only Polygon is supported"
            )
        rings = geometry.get("coordinates") or []
        if len(rings) != 1:
            raise ValueError(f"{path}: footprint {fid!r} has holes; not supported")
        ids.append(fid)
        polygons.append(FootprintPolygon(tuple((p[0], p[1]) for p in rings[0])))
    return ids, polygons


_RASTER_HEADER_KEYS = (
    "ncols",
    "nrows",
    "xllcorner",
    "yllcorner",
    "cellsize",
    "timestamp",
    "ground_temp",
)


def read_lst_raster(path: str | Path) -> LstObservation:
    """Read one LST ASCII grid.

    Seven header lines (``key value``) precede ``nrows`` data lines of
    ``ncols`` values each.  Data lines run north to south, so the first
    line is the top row; grids are stored internally with row 0 at the
    bottom.  ``NaN`` marks cells with no data.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if len(lines) < len(_RASTER_HEADER_KEYS):
        raise ValueError(f"{path}: truncated raster header")
    header: dict[str, str] = {}
    for key, line in zip(_RASTER_HEADER_KEYS, lines):
        parts = line.split(None, 1)
        if len(parts) != 2 or parts[0].lower() != key:
            raise ValueError(f"{path}: expected header line {key!r}, got {line!r}")
        header[key] = parts[1].strip()
    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    if ncols < 1 or nrows < 1:
        raise ValueError(f"{path}: raster must have at least one cell")
    data_lines = [line for line in lines[len(_RASTER_HEADER_KEYS) :] if line.strip()]
    if len(data_lines) != nrows:
        raise ValueError(f"{path}: expected {nrows} data rows, found {len(data_lines)}")
    grid = np.empty((nrows, ncols), dtype=np.float64)
    for file_row, line in enumerate(data_lines):
        tokens = line.split()
        if len(tokens) != ncols:
            raise ValueError(
                f"{path}: row {file_row} has {len(tokens)} values, expected {ncols}"
            )
        # First file row is the northernmost; flip so grid row 0 is south.
        grid[nrows - 1 - file_row] = [float(t) for t in tokens]
    return LstObservation(
        grid=grid,
        origin=(float(header["xllcorner"]), float(header["yllcorner"])),
        cell_size=float(header["cellsize"]),
        timestamp=header["timestamp"],
        ground_temp=float(header["ground_temp"]),
    )


def read_lst_dir(directory: str | Path) -> list[LstObservation]:
    """Read every ``*.asc`` raster in a directory, sorted by file name."""
    directory = Path(directory)
    return [read_lst_raster(p) for p in sorted(directory.glob("*.asc"))]


@dataclass(frozen=True)
class IngestLog:
    """Counts and ids recording what the join and LST stages dropped."""

    total: int
    matched: int
    unmatched_ids: tuple[str, ...]
    missing_lst_ids: tuple[str, ...]
    missing_channel_counts: dict[str, int]


def assemble_dataset(
    manifest_rows: Sequence[ManifestRow],
    footprints: Sequence[FootprintPolygon],
    observations: Sequence[LstObservation] = (),
    embeddings: Mapping[FeatureChannel, EmbeddingMatrix] | None = None,
    lst_threshold: float = 5.0,
    lst_reducer: str = "mean",
) -> tuple[list[BuildingRecord], IngestLog]:
    """Join manifest points onto footprints and attach feature values.

    Rows whose point matches no footprint are dropped and logged.  A
    missing LST value (no cold observation covered the footprint) is kept
    as None and logged, not treated as an error.
    """
    embeddings = dict(embeddings or {})
    join = spatial_join([(r.id, (r.x, r.y)) for r in manifest_rows], footprints)
    records: list[BuildingRecord] = []
    missing_lst: list[str] = []
    missing_channel = {channel.tag: 0 for channel in embeddings}
    for row in manifest_rows:
        poly_index = join.matched.get(row.id)
        if poly_index is None:
            continue
        polygon = footprints[poly_index]
        lst_value = None
        if observations:
            lst_value = lst_zonal_aggregate(
                observations, polygon, threshold=lst_threshold, reducer=lst_reducer
            )
        if lst_value is None:
            missing_lst.append(row.id)
        refs: dict[FeatureChannel, int] = {}
        for channel, matrix in embeddings.items():
            try:
                refs[channel] = matrix.row_index(row.id)
            except KeyError:
                missing_channel[channel.tag] += 1
        records.append(
            build_record(
                record_id=row.id,
                geography=row.geography,
                centroid=(row.x, row.y),
                footprint=polygon,
                unit_labels=row.unit_labels,
                lst_value=lst_value,
                energy_consumption=row.energy_consumption,
                embedding_refs=refs,
            )
        )
    log = IngestLog(
        total=len(manifest_rows),
        matched=len(records),
        unmatched_ids=join.unmatched,
        missing_lst_ids=tuple(missing_lst),
        missing_channel_counts=missing_channel,
    )
    return records, log


@dataclass
class DatasetBundle:
    """Records plus embedding matrices and an optional split."""

    records: tuple[BuildingRecord, ...]
    embeddings: dict[FeatureChannel, EmbeddingMatrix] = field(default_factory=dict)
    split: DatasetSplit | None = None

    def __post_init__(self) -> None:
        self.records = tuple(self.records)
        self._by_id = {r.id: r for r in self.records}
        if len(self._by_id) != len(self.records):
            raise ValueError("duplicate record ids in bundle")

    def record_by_id(self, record_id: str) -> BuildingRecord:
        try:
            return self._by_id[record_id]
        except KeyError:
            raise KeyError(f"no record with id {record_id!r}") from None

    def records_for(self, ids: frozenset[str] | set[str]) -> list[BuildingRecord]:
        """Records whose id is in ``ids``, sorted by id."""
        return sorted((r for r in self.records if r.id in ids), key=lambda r: r.id)


def _record_to_json(record: BuildingRecord) -> dict:
    return {
        "id": record.id,
        "geography": record.geography,
        "centroid": list(record.centroid),
        "footprint": [list(p) for p in record.footprint.ring],
        "unit_labels": [u.name for u in record.unit_labels],
        "lst_value": record.lst_value,
        "energy_consumption": record.energy_consumption,
        "embedding_refs": {c.tag: i for c, i in record.embedding_refs.items()},
    }


def _record_from_json(obj: dict) -> BuildingRecord:
    return build_record(
        record_id=obj["id"],
        geography=obj["geography"],
        centroid=tuple(obj["centroid"]),
        footprint=FootprintPolygon(tuple(tuple(p) for p in obj["footprint"])),
        unit_labels=[EfficiencyLabel[u] for u in obj["unit_labels"]],
        lst_value=obj.get("lst_value"),
        energy_consumption=obj.get("energy_consumption"),
        embedding_refs={
            FeatureChannel.from_tag(tag): idx
            for tag, idx in (obj.get("embedding_refs") or {}).items()
        },
    )


def split_to_json(split: DatasetSplit) -> dict:
    return {
        "train": sorted(split.train),
        "validation": sorted(split.validation),
        "test": sorted(split.test),
        "seed": split.seed,
        "holdout_geography": split.holdout_geography,
    }


def split_from_json(obj: dict) -> DatasetSplit:
    return DatasetSplit(
        train=frozenset(obj["train"]),
        validation=frozenset(obj["validation"]),
        test=frozenset(obj["test"]),
        seed=int(obj["seed"]),
        holdout_geography=obj.get("holdout_geography"),
    )


def write_json(path: str | Path, obj) -> None:
    """Stable JSON writer: sorted keys, two-space indent, trailing newline."""
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def save_bundle(bundle: DatasetBundle, directory: str | Path, name: str = "dataset") -> Path:
    """Write ``<name>.json`` plus one EMB1 file per embedding channel."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    embedding_files = {}
    for channel in sorted(bundle.embeddings):
        matrix = bundle.embeddings[channel]
        filename = f"emb_{channel.tag.lower()}.emb"
        write_embeddings(matrix, directory / filename)
        embedding_files[channel.tag] = filename
    doc = {
        "records": [_record_to_json(r) for r in bundle.records],
        "embedding_files": embedding_files,
        "split": split_to_json(bundle.split) if bundle.split else None,
    }
    path = directory / f"{name}.json"
    write_json(path, doc)
    return path


def load_bundle(path: str | Path) -> DatasetBundle:
    """Load a bundle from its ``<name>.json`` file."""
    path = Path(path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    embeddings = {}
    for tag, filename in (doc.get("embedding_files") or {}).items():
        channel = FeatureChannel.from_tag(tag)
        embeddings[channel] = read_embeddings(path.parent / filename, channel=channel)
    split = split_from_json(doc["split"]) if doc.get("split") else None
    return DatasetBundle(
        records=tuple(_record_from_json(o) for o in doc["records"]),
        embeddings=embeddings,
        split=split,
    )
