"""Embedding matrices and their on-disk format.

The binary layout is: magic ``EMB1``, then row count and dimension as
little-endian uint32, then ``count * dim`` IEEE-754 float32 values,
little-endian, row-major.  Row ids live in a companion text file whose
name is the embedding file name with its extension replaced by
``.ids.csv``; line i holds the id of row i.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from effsense.dataset.types import FeatureChannel

MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")


class EmbeddingFormatError(ValueError):
    """Base class for malformed embedding files."""


class BadMagicError(EmbeddingFormatError):
    """File does not start with the EMB1 magic."""


class TruncatedPayloadError(EmbeddingFormatError):
    """Payload size disagrees with the header (short or trailing bytes)."""


class IdCountMismatchError(EmbeddingFormatError):
    """Companion id file has a different number of ids than the matrix rows."""


@dataclass(frozen=True)
class EmbeddingMatrix:
    """A float32 matrix with one id per row, optionally tagged with a channel.

    The data array is made read-only on construction; treat instances as
    immutable values.
    """

    ids: tuple[str, ...]
    data: np.ndarray
    channel: FeatureChannel | None = None

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 2:
            raise ValueError(f"embedding data must be 2-D, got {data.ndim}-D")
        ids = tuple(str(i) for i in self.ids)
        if len(ids) != data.shape[0]:
            raise ValueError(
                f"{len(ids)} ids for {data.shape[0]} rows; one id per row required"
            )
        if len(set(ids)) != len(ids):
            raise ValueError("embedding row ids must be unique")
        if not np.isfinite(data).all():
            raise ValueError("embedding data must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return int(self.data.shape[1])

    def __len__(self) -> int:
        return int(self.data.shape[0])

    @cached_property
    def _index(self) -> dict[str, int]:
        return {rid: i for i, rid in enumerate(self.ids)}

    def row_index(self, row_id: str) -> int:
        try:
            return self._index[row_id]
        except KeyError:
            raise KeyError(f"id {row_id!r} not in embedding matrix") from None

    def row(self, row_id: str) -> np.ndarray:
        return self.data[self.row_index(row_id)]


def ids_path(path: str | Path) -> Path:
    """Companion id file for an embedding file path."""
    return Path(path).with_suffix(".ids.csv")


def write_embeddings(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Write the matrix and its companion id file."""
    path = Path(path)
    count, dim = matrix.data.shape
    header = _HEADER.pack(MAGIC, count, dim)
    path.write_bytes(header + matrix.data.astype("<f4", copy=False).tobytes(order="C"))
    ids_path(path).write_text(
        "".join(f"{rid}\n" for rid in matrix.ids), encoding="utf-8"
    )


def read_embeddings(
    path: str | Path, channel: FeatureChannel | None = None
) -> EmbeddingMatrix:
    """Read a matrix, validating magic, payload size, and id count."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < len(MAGIC):
        raise TruncatedPayloadError(f"{path}: file shorter than the magic")
    if blob[: len(MAGIC)] != MAGIC:
        raise BadMagicError(f"{path}: expected magic {MAGIC!r}, got {blob[:4]!r}")
    if len(blob) < _HEADER.size:
        raise TruncatedPayloadError(f"{path}: header truncated")
    _, count, dim = _HEADER.unpack_from(blob)
    expected = count * dim * 4
    payload = blob[_HEADER.size :]
    if len(payload) != expected:
        raise TruncatedPayloadError(
            f"{path}: header promises {expected} payload bytes, found {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(count, dim).copy()
    id_file = ids_path(path)
    ids = id_file.read_text(encoding="utf-8").splitlines()
    if len(ids) != count:
        raise IdCountMismatchError(
            f"{id_file}: {len(ids)} ids for {count} embedding rows"
        )
    return EmbeddingMatrix(ids=tuple(ids), data=data, channel=channel)
