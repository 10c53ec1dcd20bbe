"""Save and load trained heads.

A head directory holds ``head.json`` (kind, channels, config, scalar
stats, class weights, history) and one EMB1 file per parameter array.
Vectors are stored as 1-row matrices.  EMB1 payloads are float32, so a
reloaded head is the float32 rounding of the trained float64 parameters;
every consumer reads the same bytes, which keeps downstream results
reproducible.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from effsense.dataset.embeddings import EmbeddingMatrix, read_embeddings, write_embeddings
from effsense.dataset.ingest import write_json
from effsense.dataset.types import FeatureChannel
from effsense.fusion.features import ScalarStats
from effsense.fusion.head import HeadParameters
from effsense.fusion.train import TrainConfig, TrainedHead, TrainHistory


def _stats_to_json(stats: ScalarStats) -> dict:
    return {
        "mean": {c.tag: v for c, v in stats.mean.items()},
        "std": {c.tag: v for c, v in stats.std.items()},
    }


def _stats_from_json(obj: dict) -> ScalarStats:
    return ScalarStats(
        mean={FeatureChannel.from_tag(t): v for t, v in obj["mean"].items()},
        std={FeatureChannel.from_tag(t): v for t, v in obj["std"].items()},
    )


def save_head(head: TrainedHead, directory: str | Path) -> Path:
    """Write the head descriptor and its parameter blobs."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    param_files = {}
    for name in sorted(head.params.arrays):
        arr = head.params.arrays[name]
        rows = arr[None, :] if arr.ndim == 1 else arr
        filename = f"{name}.emb"
        matrix = EmbeddingMatrix(
            ids=tuple(f"{name}{i}" for i in range(rows.shape[0])),
            data=rows.astype(np.float32),
        )
        write_embeddings(matrix, directory / filename)
        param_files[name] = {"file": filename, "vector": arr.ndim == 1}
    doc = {
        "head_kind": head.params.head_kind,
        "channels": [c.tag for c in head.channels],
        "config": {
            "learning_rate": head.config.learning_rate,
            "batch_size": head.config.batch_size,
            "epochs": head.config.epochs,
            "beta1": head.config.beta1,
            "beta2": head.config.beta2,
            "eps": head.config.eps,
            "dropout_p": head.config.dropout_p,
            "seed": head.config.seed,
        },
        "scalar_stats": _stats_to_json(head.stats),
        "class_weights": list(head.class_weights),
        "history": {
            "train_loss": list(head.history.train_loss),
            "val_loss": list(head.history.val_loss),
            "val_macro_f1": list(head.history.val_macro_f1),
            "best_epoch": head.history.best_epoch,
            "rng_fingerprint": head.history.rng_fingerprint,
        },
        "param_files": param_files,
    }
    path = directory / "head.json"
    write_json(path, doc)
    return path


def load_head(directory: str | Path) -> TrainedHead:
    """Load a head saved by save_head."""
    directory = Path(directory)
    doc = json.loads((directory / "head.json").read_text(encoding="utf-8"))
    arrays = {}
    for name, entry in doc["param_files"].items():
        matrix = read_embeddings(directory / entry["file"])
        arr = matrix.data.astype(np.float64)
        arrays[name] = arr[0] if entry["vector"] else arr
    params = HeadParameters(head_kind=doc["head_kind"], arrays=arrays)
    config = TrainConfig(
        learning_rate=doc["config"]["learning_rate"],
        batch_size=doc["config"]["batch_size"],
        epochs=doc["config"]["epochs"],
        beta1=doc["config"]["beta1"],
        beta2=doc["config"]["beta2"],
        eps=doc["config"]["eps"],
        dropout_p=doc["config"]["dropout_p"],
        seed=doc["config"]["seed"],
        class_weights=tuple(doc["class_weights"]),
        scalar_stats=_stats_from_json(doc["scalar_stats"]),
    )
    history = TrainHistory(
        train_loss=tuple(doc["history"]["train_loss"]),
        val_loss=tuple(doc["history"]["val_loss"]),
        val_macro_f1=tuple(doc["history"]["val_macro_f1"]),
        best_epoch=doc["history"]["best_epoch"],
        rng_fingerprint=doc["history"]["rng_fingerprint"],
    )
    return TrainedHead(
        params=params,
        channels=tuple(FeatureChannel.from_tag(t) for t in doc["channels"]),
        config=config,
        stats=config.scalar_stats,
        class_weights=tuple(doc["class_weights"]),
        history=history,
    )
