"""Writer for the EMB1 embedding file format.

Layout: magic ``EMB1``, row count and dimension as little-endian uint32,
then ``count * dim`` IEEE-754 float32 values, little-endian, row-major.
Row ids go to a companion text file (same name, extension replaced by
``.ids.csv``), one id per line, line i naming row i.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Sequence

import numpy as np

MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")


def ids_path(path: str | Path) -> Path:
    """Companion id file for an embedding file path."""
    return Path(path).with_suffix(".ids.csv")


def write_emb1(ids: Sequence[str], data: np.ndarray, path: str | Path) -> None:
    """Write the matrix and its companion id file."""
    path = Path(path)
    data = np.ascontiguousarray(data, dtype="<f4")
    if data.ndim != 2:
        raise ValueError(f"embedding data must be 2-D, got {data.ndim}-D")
    if len(ids) != data.shape[0]:
        raise ValueError(f"{len(ids)} ids for {data.shape[0]} rows")
    if len(set(ids)) != len(ids):
        raise ValueError("embedding row ids must be unique")
    if not np.isfinite(data).all():
        raise ValueError("embedding data must be finite")
    count, dim = data.shape
    path.write_bytes(_HEADER.pack(MAGIC, count, dim) + data.tobytes(order="C"))
    ids_path(path).write_text("".join(f"{rid}\n" for rid in ids), encoding="utf-8")
