"""File readers, dataset assembly, and bundle round-trips."""

import numpy as np
import pytest

from effsense.dataset.embeddings import EmbeddingMatrix
from effsense.dataset.geometry import FootprintPolygon
from effsense.dataset.ingest import (
    DatasetBundle,
    assemble_dataset,
    load_bundle,
    read_footprints,
    read_lst_raster,
    read_manifest,
    save_bundle,
)
from effsense.dataset.split import split_dataset
from effsense.dataset.types import BinaryClass, EfficiencyLabel, FeatureChannel

from conftest import make_record

MANIFEST = """id,geography,x,y,label_units,energy_consumption
b1,leeds,1.0,1.0,C|E,120.5
b2,leeds,5.0,5.0,B,
b3,peterborough,99.0,99.0,G,310.0
"""

FOOTPRINTS = {
    "type": "FeatureCollection",
    "features": [
        {
            "type": "Feature",
            "properties": {"id": "b1"},
            "geometry": {
                "type": "Polygon",
                "coordinates": [[[0, 0], [2, 0], [2, 2], [0, 2], [0, 0]]],
            },
        },
        {
            "type": "Feature",
            "properties": {"id": "b2"},
            "geometry": {
                "type": "Polygon",
                "coordinates": [[[4, 4], [6, 4], [6, 6], [4, 6], [4, 4]]],
            },
        },
    ],
}

RASTER = """ncols 2
nrows 2
xllcorner 0.0
yllcorner 0.0
cellsize 1.0
timestamp 2013-01-05
ground_temp 2.0
30 40
10 20
"""


def write_sources(tmp_path):
    import json

    (tmp_path / "manifest.csv").write_text(MANIFEST, encoding="utf-8")
    (tmp_path / "footprints.geojson").write_text(
        json.dumps(FOOTPRINTS), encoding="utf-8"
    )
    (tmp_path / "scene.asc").write_text(RASTER, encoding="utf-8")
    return tmp_path


def test_read_manifest_fields(tmp_path):
    path = write_sources(tmp_path) / "manifest.csv"
    rows = read_manifest(path)
    assert [r.id for r in rows] == ["b1", "b2", "b3"]
    assert rows[0].unit_labels == (EfficiencyLabel.C, EfficiencyLabel.E)
    assert rows[0].energy_consumption == 120.5
    assert rows[1].energy_consumption is None
    assert (rows[2].x, rows[2].y) == (99.0, 99.0)


def test_read_manifest_rejects_bad_input(tmp_path):
    bad_header = tmp_path / "bad.csv"
    bad_header.write_text("id,x,y\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_manifest(bad_header)
    dup = tmp_path / "dup.csv"
    dup.write_text(
        "id,geography,x,y,label_units,energy_consumption\n"
        "b1,leeds,0,0,C,\nb1,leeds,1,1,D,\n",
        encoding="utf-8",
    )
    with pytest.raises(ValueError):
        read_manifest(dup)
    empty_units = tmp_path / "units.csv"
    empty_units.write_text(
        "id,geography,x,y,label_units,energy_consumption\nb1,leeds,0,0,,\n",
        encoding="utf-8",
    )
    with pytest.raises(ValueError):
        read_manifest(empty_units)


def test_read_footprints(tmp_path):
    path = write_sources(tmp_path) / "footprints.geojson"
    ids, polygons = read_footprints(path)
    assert ids == ["b1", "b2"]
    # The closing vertex is stripped on construction.
    assert polygons[0].ring == ((0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0))


def test_read_footprints_rejects_multipolygon(tmp_path):
    import json

    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {"id": "m1"},
                "geometry": {"type": "MultiPolygon", "coordinates": []},
            }
        ],
    }
    path = tmp_path / "multi.geojson"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ValueError):
        read_footprints(path)


def test_read_lst_raster_flips_rows(tmp_path):
    path = write_sources(tmp_path) / "scene.asc"
    obs = read_lst_raster(path)
    # The first data line is the northern row, so it lands in grid row 1.
    assert obs.grid.tolist() == [[10.0, 20.0], [30.0, 40.0]]
    assert obs.origin == (0.0, 0.0)
    assert obs.ground_temp == 2.0
    assert obs.timestamp == "2013-01-05"


def test_read_lst_raster_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.asc"
    path.write_text("ncols 2\nnrows 2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_lst_raster(path)
    shuffled = tmp_path / "shuffled.asc"
    shuffled.write_text(
        RASTER.replace("ncols 2\nnrows 2", "nrows 2\nncols 2"), encoding="utf-8"
    )
    with pytest.raises(ValueError):
        read_lst_raster(shuffled)


def test_assemble_dataset_joins_and_logs(tmp_path):
    write_sources(tmp_path)
    rows = read_manifest(tmp_path / "manifest.csv")
    _, polygons = read_footprints(tmp_path / "footprints.geojson")
    obs = read_lst_raster(tmp_path / "scene.asc")
    emb = EmbeddingMatrix(
        ids=("b1",), data=np.ones((1, 4)), channel=FeatureChannel.SV
    )
    records, log = assemble_dataset(
        rows, polygons, [obs], embeddings={FeatureChannel.SV: emb}
    )
    assert [r.id for r in records] == ["b1", "b2"]
    assert log.total == 3
    assert log.matched == 2
    assert log.unmatched_ids == ("b3",)
    # b2 sits off the 2x2 raster with no center inside, so the nearest
    # center (1.5, 1.5) supplies its value: 40.
    by_id = {r.id: r for r in records}
    assert by_id["b1"].lst_value == 25.0
    assert by_id["b2"].lst_value == 40.0
    assert log.missing_lst_ids == ()
    assert by_id["b1"].label == EfficiencyLabel.E
    assert by_id["b1"].binary == BinaryClass.INEFFICIENT
    assert by_id["b1"].embedding_refs == {FeatureChannel.SV: 0}
    assert by_id["b2"].embedding_refs == {}
    assert log.missing_channel_counts == {"SV": 1}


def test_assemble_without_observations_leaves_lst_missing(tmp_path):
    write_sources(tmp_path)
    rows = read_manifest(tmp_path / "manifest.csv")
    _, polygons = read_footprints(tmp_path / "footprints.geojson")
    records, log = assemble_dataset(rows, polygons)
    assert all(r.lst_value is None for r in records)
    assert set(log.missing_lst_ids) == {"b1", "b2"}


def sample_bundle():
    records = [
        make_record("a1", grade="B", lst_value=12.5, energy_consumption=90.0),
        make_record("a2", grade="F", centroid=(20.0, 20.0)),
        make_record("a3", grade="D", centroid=(40.0, 40.0)),
    ]
    rng = np.random.default_rng(0)
    emb = EmbeddingMatrix(
        ids=("a1", "a2", "a3"),
        data=rng.normal(size=(3, 5)).astype(np.float32),
        channel=FeatureChannel.AV,
    )
    split = split_dataset(records, seed=1, counts=(1, 1, 1))
    return DatasetBundle(
        records=tuple(records), embeddings={FeatureChannel.AV: emb}, split=split
    )


def test_bundle_round_trip(tmp_path):
    bundle = sample_bundle()
    path = save_bundle(bundle, tmp_path)
    loaded = load_bundle(path)
    assert [r.id for r in loaded.records] == ["a1", "a2", "a3"]
    a1 = loaded.record_by_id("a1")
    assert a1.lst_value == 12.5
    assert a1.energy_consumption == 90.0
    assert a1.label == EfficiencyLabel.B
    assert loaded.split == bundle.split
    orig = bundle.embeddings[FeatureChannel.AV]
    back = loaded.embeddings[FeatureChannel.AV]
    assert back.ids == orig.ids
    assert np.array_equal(back.data, orig.data)


def test_bundle_save_is_byte_stable(tmp_path):
    first = tmp_path / "one"
    second = tmp_path / "two"
    save_bundle(sample_bundle(), first)
    save_bundle(sample_bundle(), second)
    for name in ("dataset.json", "emb_av.emb", "emb_av.ids.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_bundle_record_lookup():
    bundle = sample_bundle()
    with pytest.raises(KeyError):
        bundle.record_by_id("missing")
    assert [r.id for r in bundle.records_for({"a3", "a1"})] == ["a1", "a3"]
