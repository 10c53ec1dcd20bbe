"""Pixel-probe detection of placeholder aerial tiles and mask application.

Imagery providers return a uniform "no data" tile for unavailable areas.
Such tiles are detected by probing a few fixed pixels for an exact colour
match, which is cheap and has no false positives on real photographs in
practice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Default placeholder colour of the aerial provider's empty tile.
DEFAULT_SENTINEL_RGB = (228, 227, 223)


@dataclass(frozen=True)
class SentinelSignature:
    """Probe pixels and the number of matches that marks a tile empty.

    ``probes`` is a tuple of (x, y, (r, g, b)); a probe matches when the
    pixel at that position equals the colour exactly.
    """

    probes: tuple[tuple[int, int, tuple[int, int, int]], ...]
    min_matches: int

    def __post_init__(self) -> None:
        if not self.probes:
            raise ValueError("signature needs at least one probe")
        if not (1 <= self.min_matches <= len(self.probes)):
            raise ValueError("min_matches must be between 1 and the probe count")


def corner_signature(
    width: int,
    height: int,
    rgb: tuple[int, int, int] = DEFAULT_SENTINEL_RGB,
    min_matches: int = 4,
) -> SentinelSignature:
    """The default signature: the four image corners, all required."""
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be positive")
    corners = (
        (0, 0),
        (width - 1, 0),
        (0, height - 1),
        (width - 1, height - 1),
    )
    probes = tuple((x, y, tuple(rgb)) for x, y in dict.fromkeys(corners))
    return SentinelSignature(probes=probes, min_matches=min(min_matches, len(probes)))


def detect_empty_aerial(image: np.ndarray, signature: SentinelSignature) -> bool:
    """True when at least ``min_matches`` probes hit their colour exactly."""
    data = np.asarray(image)
    if data.ndim != 3 or data.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) image")
    height, width = data.shape[:2]
    matches = 0
    for x, y, rgb in signature.probes:
        if not (0 <= x < width and 0 <= y < height):
            raise ValueError(f"probe ({x}, {y}) outside a {width}x{height} image")
        if tuple(int(v) for v in data[y, x]) == tuple(rgb):
            matches += 1
    return matches >= signature.min_matches


def apply_mask(
    image: np.ndarray,
    mask: np.ndarray,
    fill: tuple[int, int, int] = (128, 128, 128),
) -> np.ndarray:
    """Return a copy of ``image`` with masked pixels set to ``fill``.

    ``mask`` is (H, W) boolean (or 0/1); True means replace the pixel.
    """
    data = np.asarray(image)
    if data.ndim != 3 or data.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) image")
    mask = np.asarray(mask)
    if mask.shape != data.shape[:2]:
        raise ValueError(
            f"mask shape {mask.shape} does not match image {data.shape[:2]}"
        )
    out = data.copy()
    out[mask.astype(bool)] = np.asarray(fill, dtype=data.dtype)
    return out
