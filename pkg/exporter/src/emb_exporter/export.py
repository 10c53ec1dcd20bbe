"""Directory-to-EMB1 export jobs.

An export walks one image directory, encodes every decodable image with
the frozen encoder, and writes one embedding file with rows in sorted-id
order (the id of an image is its filename stem).  Undecodable images are
skipped and reported; masks for the segmented variant paint masked
pixels with a fixed fill color before preprocessing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from emb_exporter.emb1 import ids_path, write_emb1
from emb_exporter.encoder import Encoder

VARIANTS = ("SV", "AV", "SegSV")
IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".webp")
MASK_FILL = (128, 128, 128)


class ExportError(ValueError):
    """The job's inputs cannot produce an embedding file."""


@dataclass(frozen=True)
class ExportJob:
    """One directory-to-file export.

    ``variant`` tags the output channel; the segmented variant requires a
    mask directory holding one grayscale image per id (absent masks mean
    no masked pixels).
    """

    image_dir: Path
    variant: str
    out_path: Path
    batch_size: int = 32
    device: str = "cpu"
    weights_path: Path | None = None
    masks_dir: Path | None = None
    init_seed: int = 0

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.variant == "SegSV" and self.masks_dir is None:
            raise ValueError("the SegSV variant requires a mask directory")
        if self.init_seed < 0:
            raise ValueError("init_seed must be non-negative")
        object.__setattr__(self, "image_dir", Path(self.image_dir))
        object.__setattr__(self, "out_path", Path(self.out_path))
        if self.masks_dir is not None:
            object.__setattr__(self, "masks_dir", Path(self.masks_dir))
        if self.weights_path is not None:
            object.__setattr__(self, "weights_path", Path(self.weights_path))


@dataclass(frozen=True)
class ExportResult:
    out_path: Path
    ids: tuple[str, ...]
    dim: int
    skipped: tuple[str, ...] = ()

    @property
    def warning_count(self) -> int:
        return len(self.skipped)


def list_images(image_dir: Path) -> dict[str, Path]:
    """Map image id (filename stem) to path, sorted by id."""
    if not image_dir.is_dir():
        raise ExportError(f"image directory {image_dir} does not exist")
    paths = sorted(
        p for p in image_dir.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )
    if not paths:
        raise ExportError(f"no image files in {image_dir}")
    images: dict[str, Path] = {}
    for path in paths:
        if path.stem in images:
            raise ExportError(
                f"duplicate image id {path.stem!r}: {images[path.stem].name} "
                f"and {path.name}"
            )
        images[path.stem] = path
    return dict(sorted(images.items()))


def load_image(path: Path) -> np.ndarray:
    """Decode an image into an (H, W, 3) uint8 array."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def apply_mask(
    image: np.ndarray, mask: np.ndarray, fill: tuple[int, int, int] = MASK_FILL
) -> np.ndarray:
    """Paint masked (nonzero) pixels with the fill color; returns a copy."""
    if mask.shape != image.shape[:2]:
        raise ExportError(
            f"mask shape {mask.shape} does not match image shape {image.shape[:2]}"
        )
    out = image.copy()
    out[mask > 0] = np.asarray(fill, dtype=np.uint8)
    return out


def _load_mask(masks_dir: Path, image_id: str) -> np.ndarray | None:
    path = masks_dir / f"{image_id}.png"
    if not path.exists():
        return None
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def _write_provenance(job: ExportJob, encoder: Encoder, result: ExportResult) -> Path:
    payload = {
        "variant": job.variant,
        "encoder": {
            "architecture": "inception_v3",
            "embedding_dim": encoder.dim,
            "weights": encoder.weights,
        },
        "preprocessing": encoder.preprocessing_provenance(),
        "images": {
            "count": len(result.ids),
            "skipped": list(result.skipped),
            "warning_count": result.warning_count,
        },
    }
    if job.variant == "SegSV":
        payload["preprocessing"]["mask_fill"] = list(MASK_FILL)
    path = job.out_path.with_suffix(".provenance.json")
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def export_embeddings(job: ExportJob, encoder: Encoder | None = None) -> ExportResult:
    """Run one export job; returns the written ids and skip list.

    Rows are written in sorted-id order.  Undecodable images are skipped
    and listed in the result and the provenance sidecar; a job where no
    image survives decoding is an error.
    """
    images = list_images(job.image_dir)
    if encoder is None:
        encoder = Encoder(weights_path=job.weights_path, init_seed=job.init_seed)

    kept_ids: list[str] = []
    skipped: list[str] = []
    rows: list[np.ndarray] = []
    chunk_ids: list[str] = []
    chunk: list[np.ndarray] = []

    def flush() -> None:
        if chunk:
            rows.append(encoder.encode_batch(chunk))
            kept_ids.extend(chunk_ids)
            chunk.clear()
            chunk_ids.clear()

    for image_id, path in images.items():
        try:
            image = load_image(path)
        except (UnidentifiedImageError, OSError):
            skipped.append(path.name)
            continue
        if job.variant == "SegSV":
            mask = _load_mask(job.masks_dir, image_id)
            if mask is not None:
                image = apply_mask(image, mask)
        chunk.append(image)
        chunk_ids.append(image_id)
        if len(chunk) == job.batch_size:
            flush()
    flush()

    if not kept_ids:
        raise ExportError(f"no decodable images in {job.image_dir}")
    data = np.concatenate(rows, axis=0)
    write_emb1(kept_ids, data, job.out_path)
    result = ExportResult(
        out_path=job.out_path,
        ids=tuple(kept_ids),
        dim=int(data.shape[1]),
        skipped=tuple(skipped),
    )
    _write_provenance(job, encoder, result)
    return result


__all__ = [
    "ExportError",
    "ExportJob",
    "ExportResult",
    "MASK_FILL",
    "apply_mask",
    "export_embeddings",
    "ids_path",
    "list_images",
    "load_image",
]
