"""Feature concatenation for the fused heads.

Channels always concatenate in their canonical order (SV, AV, SegSV, LST,
FP, EC) regardless of how a subset was requested, so a feature subset has
exactly one vector layout.  Scalar channels are z-scored with statistics
taken from the training split; embedding channels pass through unchanged.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from effsense.dataset.embeddings import EmbeddingMatrix
from effsense.dataset.records import BuildingRecord
from effsense.dataset.types import FeatureChannel


class MissingChannelError(ValueError):
    """A requested channel has no value for some record."""

    def __init__(self, record_id: str, channel: FeatureChannel):
        self.record_id = record_id
        self.channel = channel
        super().__init__(f"record {record_id!r} has no {channel.tag} value")


def canonical_channels(channels: Iterable[FeatureChannel]) -> tuple[FeatureChannel, ...]:
    """Deduplicate and sort channels into canonical concatenation order."""
    ordered = tuple(sorted(set(FeatureChannel(c) for c in channels)))
    if not ordered:
        raise ValueError("at least one feature channel is required")
    return ordered


@dataclass(frozen=True)
class ScalarStats:
    """Training-split mean and standard deviation per scalar channel.

    Standard deviation is the population value; a zero deviation falls back
    to 1 so constant features z-score to 0 instead of dividing by zero.
    """

    mean: Mapping[FeatureChannel, float]
    std: Mapping[FeatureChannel, float]

    def zscore(self, channel: FeatureChannel, value: float) -> float:
        mean = self.mean[channel]
        std = self.std[channel]
        return (value - mean) / (std if std > 0 else 1.0)


def scalar_stats(
    records: Sequence[BuildingRecord], channels: Iterable[FeatureChannel]
) -> ScalarStats:
    """Compute z-score statistics for the scalar channels in ``channels``.

    Every record must carry a value for each requested scalar channel;
    statistics from a split with holes would silently shift the scale.
    """
    wanted = [c for c in canonical_channels(channels) if c.is_scalar]
    means: dict[FeatureChannel, float] = {}
    stds: dict[FeatureChannel, float] = {}
    for channel in wanted:
        values = []
        for record in records:
            value = record.scalar_value(channel)
            if value is None:
                raise MissingChannelError(record.id, channel)
            values.append(value)
        if not values:
            raise ValueError("cannot compute scalar stats from no records")
        arr = np.asarray(values, dtype=np.float64)
        means[channel] = float(arr.mean())
        stds[channel] = float(arr.std())
    return ScalarStats(mean=means, std=stds)


@dataclass(frozen=True)
class FusionInput:
    """A concatenated feature vector with its channel layout.

    ``layout`` lists (channel, start, stop) slices into ``vector`` in
    canonical order; attribution roll-ups use it to sum per channel.
    """

    channels: tuple[FeatureChannel, ...]
    vector: np.ndarray
    layout: tuple[tuple[FeatureChannel, int, int], ...]

    def __post_init__(self) -> None:
        vector = np.ascontiguousarray(self.vector, dtype=np.float64)
        if vector.ndim != 1:
            raise ValueError("fusion input must be a 1-D vector")
        if not np.isfinite(vector).all():
            raise ValueError("fusion input must be finite")
        if self.layout[-1][2] != vector.shape[0]:
            raise ValueError("layout does not cover the vector")
        vector.setflags(write=False)
        object.__setattr__(self, "vector", vector)

    @property
    def dim(self) -> int:
        return int(self.vector.shape[0])


def _channel_value(
    record: BuildingRecord,
    channel: FeatureChannel,
    stats: ScalarStats,
    embeddings: Mapping[FeatureChannel, EmbeddingMatrix],
) -> np.ndarray:
    if channel.is_scalar:
        raw = record.scalar_value(channel)
        if raw is None:
            raise MissingChannelError(record.id, channel)
        return np.asarray([stats.zscore(channel, raw)], dtype=np.float64)
    matrix = embeddings.get(channel)
    ref = record.embedding_refs.get(channel)
    if matrix is None or ref is None:
        raise MissingChannelError(record.id, channel)
    if not (0 <= ref < len(matrix)):
        raise ValueError(
            f"record {record.id!r} references {channel.tag} row {ref}, "
            f"matrix has {len(matrix)} rows"
        )
    return matrix.data[ref].astype(np.float64)


def concat_features(
    record: BuildingRecord,
    channels: Iterable[FeatureChannel],
    stats: ScalarStats,
    embeddings: Mapping[FeatureChannel, EmbeddingMatrix],
) -> FusionInput:
    """Concatenate the requested channels for one record, canonical order."""
    ordered = canonical_channels(channels)
    pieces = []
    layout = []
    offset = 0
    for channel in ordered:
        piece = _channel_value(record, channel, stats, embeddings)
        layout.append((channel, offset, offset + piece.shape[0]))
        offset += piece.shape[0]
        pieces.append(piece)
    return FusionInput(
        channels=ordered,
        vector=np.concatenate(pieces),
        layout=tuple(layout),
    )


def build_feature_matrix(
    records: Sequence[BuildingRecord],
    channels: Iterable[FeatureChannel],
    stats: ScalarStats,
    embeddings: Mapping[FeatureChannel, EmbeddingMatrix],
) -> tuple[np.ndarray, tuple[tuple[FeatureChannel, int, int], ...]]:
    """Stack per-record fusion vectors into an (N, dim) float64 matrix."""
    if not records:
        raise ValueError("no records to build features from")
    rows = [concat_features(r, channels, stats, embeddings) for r in records]
    return np.stack([r.vector for r in rows]), rows[0].layout
