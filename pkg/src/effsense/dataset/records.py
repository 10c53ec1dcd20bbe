"""The per-building record joining labels, geometry, and feature values."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from effsense.dataset.geometry import FootprintPolygon, footprint_area
from effsense.dataset.labels import aggregate_units, binarize_label
from effsense.dataset.types import BinaryClass, EfficiencyLabel, FeatureChannel


@dataclass(frozen=True)
class BuildingRecord:
    """One building with its label, geometry, and scalar features.

    ``embedding_refs`` maps an embedding channel to the row index of this
    building inside that channel's embedding matrix.  ``lst_value`` and
    ``energy_consumption`` are None when missing, which is allowed; the
    fusion stage errors only if a missing channel is actually requested.
    """

    id: str
    geography: str
    centroid: tuple[float, float]
    footprint: FootprintPolygon
    unit_labels: tuple[EfficiencyLabel, ...]
    label: EfficiencyLabel
    binary: BinaryClass
    footprint_area: float
    lst_value: float | None = None
    energy_consumption: float | None = None
    embedding_refs: Mapping[FeatureChannel, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.unit_labels:
            raise ValueError("record needs at least one unit grade")
        if self.label != aggregate_units(self.unit_labels):
            raise ValueError("building grade must be the worst unit grade")
        if self.binary != binarize_label(self.label):
            raise ValueError("binary class inconsistent with grade")
        if not (self.footprint_area > 0):
            raise ValueError("footprint area must be positive")
        for value, name in (
            (self.lst_value, "lst_value"),
            (self.energy_consumption, "energy_consumption"),
        ):
            if value is not None and not math.isfinite(value):
                raise ValueError(f"{name} must be finite when present")

    def scalar_value(self, channel: FeatureChannel) -> float | None:
        if channel == FeatureChannel.LST:
            return self.lst_value
        if channel == FeatureChannel.FP:
            return self.footprint_area
        if channel == FeatureChannel.EC:
            return self.energy_consumption
        raise ValueError(f"{channel.tag} is not a scalar channel")


def build_record(
    record_id: str,
    geography: str,
    centroid: tuple[float, float],
    footprint: FootprintPolygon,
    unit_labels: Iterable[EfficiencyLabel],
    lst_value: float | None = None,
    energy_consumption: float | None = None,
    embedding_refs: Mapping[FeatureChannel, int] | None = None,
) -> BuildingRecord:
    """Assemble a record, deriving grade, binary class, and footprint area."""
    units = tuple(EfficiencyLabel(u) for u in unit_labels)
    label = aggregate_units(units)
    return BuildingRecord(
        id=record_id,
        geography=geography,
        centroid=(float(centroid[0]), float(centroid[1])),
        footprint=footprint,
        unit_labels=units,
        label=label,
        binary=binarize_label(label),
        footprint_area=footprint_area(footprint),
        lst_value=lst_value,
        energy_consumption=energy_consumption,
        embedding_refs=dict(embedding_refs or {}),
    )
