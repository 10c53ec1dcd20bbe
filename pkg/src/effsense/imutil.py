"""Small image helpers: decoding, bilinear resize, flattening.

The resizer is written out by hand instead of delegating to Pillow because
its exact arithmetic is part of the contract for raw-pixel baselines:
destination sample positions follow the pixel-centre convention
``src = (dst + 0.5) * scale - 0.5`` clamped to the image, which makes an
exact 2x downscale equal to 2x2 block means.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError


class ImageDecodeError(ValueError):
    """File could not be decoded as an image."""


def load_image(path: str | Path) -> np.ndarray:
    """Decode an image file to an (H, W, 3) uint8 RGB array."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise ImageDecodeError(f"{path}: {exc}") from exc


def _axis_coords(out_size: int, in_size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source indices and weights for one axis of a bilinear resize."""
    scale = in_size / out_size
    src = (np.arange(out_size) + 0.5) * scale - 0.5
    src = np.clip(src, 0.0, in_size - 1.0)
    lo = np.floor(src).astype(np.int64)
    hi = np.minimum(lo + 1, in_size - 1)
    frac = src - lo
    return lo, hi, frac


def bilinear_resize(image: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize (H, W) or (H, W, C) to (out_h, out_w[, C]), returning float64."""
    if out_h < 1 or out_w < 1:
        raise ValueError("output size must be positive")
    data = np.asarray(image, dtype=np.float64)
    squeeze = data.ndim == 2
    if squeeze:
        data = data[:, :, None]
    if data.ndim != 3:
        raise ValueError("image must be 2-D or 3-D")
    in_h, in_w = data.shape[:2]
    row_lo, row_hi, row_frac = _axis_coords(out_h, in_h)
    col_lo, col_hi, col_frac = _axis_coords(out_w, in_w)
    top = data[row_lo][:, col_lo] * (1 - col_frac)[None, :, None] + data[row_lo][
        :, col_hi
    ] * col_frac[None, :, None]
    bottom = data[row_hi][:, col_lo] * (1 - col_frac)[None, :, None] + data[row_hi][
        :, col_hi
    ] * col_frac[None, :, None]
    out = top * (1 - row_frac)[:, None, None] + bottom * row_frac[:, None, None]
    return out[:, :, 0] if squeeze else out


def resize_uint8(image: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resize with rounding back to uint8."""
    out = bilinear_resize(image, out_h, out_w)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)
