"""Label and feature-channel vocabularies shared across the toolkit."""

from __future__ import annotations

import enum


class EfficiencyLabel(enum.IntEnum):
    """EPC grade, A (best) through G (worst).

    The integer order makes "worst grade" a plain ``max``, which is how
    multi-unit buildings are aggregated.
    """

    A = 1
    B = 2
    C = 3
    D = 4
    E = 5
    F = 6
    G = 7

    @classmethod
    def from_string(cls, text: str) -> "EfficiencyLabel":
        """Parse a single-letter grade, case-insensitively."""
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown EPC grade {text!r}") from None


class BinaryClass(enum.IntEnum):
    """Binary target: grades A-D collapse to EFFICIENT, E-G to INEFFICIENT."""

    EFFICIENT = 0
    INEFFICIENT = 1


class FeatureChannel(enum.IntEnum):
    """Feature channels in their canonical concatenation order.

    SV, AV, and SEG_SV are 2048-wide image embeddings; LST, FP, and EC are
    single scalars (land surface temperature, footprint area, energy
    consumption).
    """

    SV = 0
    AV = 1
    SEG_SV = 2
    LST = 3
    FP = 4
    EC = 5

    @property
    def tag(self) -> str:
        """Short name used in files and reports."""
        return _CHANNEL_TAGS[self]

    @property
    def is_scalar(self) -> bool:
        return self in (FeatureChannel.LST, FeatureChannel.FP, FeatureChannel.EC)

    @classmethod
    def from_tag(cls, tag: str) -> "FeatureChannel":
        try:
            return _TAG_CHANNELS[tag]
        except KeyError:
            raise ValueError(f"unknown feature channel {tag!r}") from None


_CHANNEL_TAGS = {
    FeatureChannel.SV: "SV",
    FeatureChannel.AV: "AV",
    FeatureChannel.SEG_SV: "SegSV",
    FeatureChannel.LST: "LST",
    FeatureChannel.FP: "FP",
    FeatureChannel.EC: "EC",
}

_TAG_CHANNELS = {tag: channel for channel, tag in _CHANNEL_TAGS.items()}

SCALAR_CHANNELS = (FeatureChannel.LST, FeatureChannel.FP, FeatureChannel.EC)
EMBEDDING_CHANNELS = (FeatureChannel.SV, FeatureChannel.AV, FeatureChannel.SEG_SV)
