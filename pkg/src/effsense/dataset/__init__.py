"""Dataset assembly: labels, geometry, temperature zonal stats, splits, embeddings."""

from effsense.dataset.embeddings import (
    BadMagicError,
    EmbeddingFormatError,
    EmbeddingMatrix,
    IdCountMismatchError,
    TruncatedPayloadError,
    read_embeddings,
    write_embeddings,
)
from effsense.dataset.geometry import (
    AmbiguousJoinError,
    FootprintPolygon,
    JoinResult,
    footprint_area,
    point_in_polygon,
    polygon_centroid,
    spatial_join,
)
from effsense.dataset.ingest import (
    DatasetBundle,
    IngestLog,
    assemble_dataset,
    load_bundle,
    read_footprints,
    read_lst_raster,
    read_manifest,
    save_bundle,
)
from effsense.dataset.labels import aggregate_units, binarize_label, class_weights
from effsense.dataset.lst import LstObservation, lst_zonal_aggregate
from effsense.dataset.records import BuildingRecord, build_record
from effsense.dataset.split import DatasetSplit, split_dataset
from effsense.dataset.types import BinaryClass, EfficiencyLabel, FeatureChannel

__all__ = [
    "AmbiguousJoinError",
    "BadMagicError",
    "BinaryClass",
    "BuildingRecord",
    "DatasetBundle",
    "DatasetSplit",
    "EfficiencyLabel",
    "EmbeddingFormatError",
    "EmbeddingMatrix",
    "FeatureChannel",
    "FootprintPolygon",
    "IdCountMismatchError",
    "IngestLog",
    "JoinResult",
    "LstObservation",
    "TruncatedPayloadError",
    "aggregate_units",
    "assemble_dataset",
    "binarize_label",
    "build_record",
    "class_weights",
    "footprint_area",
    "load_bundle",
    "lst_zonal_aggregate",
    "point_in_polygon",
    "polygon_centroid",
    "read_embeddings",
    "read_footprints",
    "read_lst_raster",
    "read_manifest",
    "save_bundle",
    "spatial_join",
    "split_dataset",
    "write_embeddings",
]
