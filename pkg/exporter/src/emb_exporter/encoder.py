"""Frozen Inception-v3 feature encoder and its inference preprocessing.

The final affine layer is dropped, so the encoder maps each image to a
2048-dimensional feature vector.  Preprocessing follows the encoder's
published inference recipe: resize the short side to 342, center-crop
299x299, scale to [0, 1], and normalize with the ImageNet statistics.

Without a weights file the encoder initializes from a fixed torch seed,
which keeps exports bit-reproducible in environments where the
pretrained weights are unavailable; pass a locally downloaded state
dict for production embeddings.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torchvision import transforms
from torchvision.models import inception_v3

EMBEDDING_DIM = 2048
RESIZE_SHORT_SIDE = 342
CROP_SIZE = 299
NORMALIZE_MEAN = (0.485, 0.456, 0.406)
NORMALIZE_STD = (0.229, 0.224, 0.225)

_PREPROCESS = transforms.Compose(
    [
        transforms.Resize(RESIZE_SHORT_SIDE),
        transforms.CenterCrop(CROP_SIZE),
        transforms.ToTensor(),
        transforms.Normalize(NORMALIZE_MEAN, NORMALIZE_STD),
    ]
)


class Encoder:
    """A frozen encoder plus the provenance of its weights."""

    def __init__(self, weights_path: str | Path | None = None, init_seed: int = 0):
        torch.set_num_threads(1)
        torch.manual_seed(init_seed)
        model = inception_v3(
            weights=None, aux_logits=True, transform_input=True, init_weights=True
        )
        if weights_path is not None:
            state = torch.load(weights_path, map_location="cpu", weights_only=True)
            model.load_state_dict(state)
            digest = hashlib.sha256(Path(weights_path).read_bytes()).hexdigest()
            self.weights = {"source": Path(weights_path).name, "sha256": digest}
        else:
            self.weights = {"source": "random-init", "seed": init_seed}
        model.fc = torch.nn.Identity()
        model.eval()
        for param in model.parameters():
            param.requires_grad_(False)
        self._model = model
        self.dim = EMBEDDING_DIM

    def encode_batch(self, images: list[np.ndarray]) -> np.ndarray:
        """Encode (H, W, 3) uint8 arrays into float32 feature rows."""
        batch = torch.stack(
            [_PREPROCESS(Image.fromarray(image, mode="RGB")) for image in images]
        )
        with torch.no_grad():
            features = self._model(batch)
        return features.numpy().astype("<f4", copy=False)

    def preprocessing_provenance(self) -> dict:
        return {
            "resize_short_side": RESIZE_SHORT_SIDE,
            "center_crop": CROP_SIZE,
            "normalize_mean": list(NORMALIZE_MEAN),
            "normalize_std": list(NORMALIZE_STD),
        }
