"""Seeded mini-batch training for the fusion heads."""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from typing import TYPE_CHECKING

from effsense.dataset.ingest import DatasetBundle
from effsense.dataset.labels import class_weights as inverse_class_weights
from effsense.dataset.types import BinaryClass, FeatureChannel
from effsense.fusion.features import (
    ScalarStats,
    build_feature_matrix,
    canonical_channels,
    scalar_stats,
)
from effsense.fusion.head import (
    AdamState,
    HeadParameters,
    adam_step,
    backward,
    forward,
    init_head_params,
    weighted_cross_entropy,
)

if TYPE_CHECKING:
    from effsense.evaluation.metrics import MetricReport


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for head training.

    ``class_weights`` of None means inverse-frequency weights computed from
    the training split.  ``scalar_stats`` of None means z-score statistics
    computed from the training split; pass explicit stats to reuse a scale.
    """

    learning_rate: float = 1e-4
    batch_size: int = 16
    epochs: int = 50
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    dropout_p: float = 0.5
    class_weights: tuple[float, float] | None = None
    scalar_stats: ScalarStats | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if not (self.learning_rate > 0):
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if not (0.0 <= self.dropout_p < 1.0):
            raise ValueError("dropout_p must be in [0, 1)")
        if self.class_weights is not None and any(
            w <= 0 for w in self.class_weights
        ):
            raise ValueError("explicit class weights must be positive")


@dataclass(frozen=True)
class TrainHistory:
    """Per-epoch curves plus the RNG fingerprint at the end of training.

    The fingerprint hashes the generator state, so two runs that consumed
    randomness identically (same seed, same data, same schedule) agree on
    it, and any divergence is visible without comparing weights.
    """

    train_loss: tuple[float, ...]
    val_loss: tuple[float, ...]
    val_macro_f1: tuple[float, ...]
    best_epoch: int
    rng_fingerprint: str


@dataclass(frozen=True)
class TrainedHead:
    """Best-epoch parameters with everything needed to reuse them."""

    params: HeadParameters
    channels: tuple[FeatureChannel, ...]
    config: TrainConfig
    stats: ScalarStats
    class_weights: tuple[float, float]
    history: TrainHistory


def _rng_fingerprint(rng: np.random.Generator) -> str:
    state = json.dumps(rng.bit_generator.state, sort_keys=True, default=str)
    return hashlib.sha256(state.encode("utf-8")).hexdigest()


def _epoch_eval(
    params: HeadParameters,
    x_val: np.ndarray,
    y_val: np.ndarray,
    weights: np.ndarray,
) -> tuple[float, float]:
    # Imported here: evaluation.ablation imports this module at load time.
    from effsense.evaluation.metrics import confusion, macro_metrics

    logits, _ = forward(params, x_val, mode="eval")
    losses, _ = weighted_cross_entropy(logits, y_val, weights)
    preds = [
        BinaryClass.INEFFICIENT if row[1] > row[0] else BinaryClass.EFFICIENT
        for row in logits
    ]
    truth = [BinaryClass(int(v)) for v in y_val]
    report = macro_metrics(confusion(truth, preds))
    return float(np.mean(losses)), report.macro_f1


def train_head(
    bundle: DatasetBundle,
    channels: Iterable[FeatureChannel],
    head_kind: str,
    config: TrainConfig | None = None,
) -> TrainedHead:
    """Train a head on the bundle's train split, checkpointing on val F1.

    One seeded generator drives parameter init, per-epoch shuffling, and
    dropout masks, in that order, so a seed pins the whole trajectory.  The
    returned parameters are from the epoch with the best validation
    macro-F1 (earliest epoch wins ties).
    """
    config = config or TrainConfig()
    if bundle.split is None:
        raise ValueError("bundle has no split; train needs train/validation sets")
    ordered = canonical_channels(channels)
    train_records = bundle.records_for(bundle.split.train)
    val_records = bundle.records_for(bundle.split.validation)
    if not train_records or not val_records:
        raise ValueError("train and validation splits must both be non-empty")

    stats = config.scalar_stats or scalar_stats(train_records, ordered)
    x_train, _ = build_feature_matrix(train_records, ordered, stats, bundle.embeddings)
    x_val, _ = build_feature_matrix(val_records, ordered, stats, bundle.embeddings)
    y_train = np.asarray([int(r.binary) for r in train_records], dtype=np.int64)
    y_val = np.asarray([int(r.binary) for r in val_records], dtype=np.int64)

    if config.class_weights is not None:
        weights = np.asarray(config.class_weights, dtype=np.float64)
    else:
        by_class = inverse_class_weights([r.binary for r in train_records])
        weights = np.asarray(
            [by_class[BinaryClass.EFFICIENT], by_class[BinaryClass.INEFFICIENT]]
        )

    rng = np.random.default_rng(config.seed)
    params = init_head_params(head_kind, x_train.shape[1], rng)
    state = AdamState.for_params(params)

    n = x_train.shape[0]
    train_curve: list[float] = []
    val_loss_curve: list[float] = []
    val_f1_curve: list[float] = []
    best_f1 = -1.0
    best_epoch = -1
    best_params = params.copy()
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            xb = x_train[batch]
            yb = y_train[batch]
            logits, cache = forward(
                params, xb, mode="train", rng=rng, dropout_p=config.dropout_p
            )
            losses, dlogits = weighted_cross_entropy(logits, yb, weights)
            loss_sum += float(losses.sum())
            grads = backward(params, cache, dlogits / len(batch))
            adam_step(
                params,
                grads,
                state,
                learning_rate=config.learning_rate,
                beta1=config.beta1,
                beta2=config.beta2,
                eps=config.eps,
            )
        train_curve.append(loss_sum / n)
        val_loss, val_f1 = _epoch_eval(params, x_val, y_val, weights)
        val_loss_curve.append(val_loss)
        val_f1_curve.append(val_f1)
        if val_f1 > best_f1:
            best_f1 = val_f1
            best_epoch = epoch
            best_params = params.copy()

    history = TrainHistory(
        train_loss=tuple(train_curve),
        val_loss=tuple(val_loss_curve),
        val_macro_f1=tuple(val_f1_curve),
        best_epoch=best_epoch,
        rng_fingerprint=_rng_fingerprint(rng),
    )
    return TrainedHead(
        params=best_params,
        channels=ordered,
        config=config,
        stats=stats,
        class_weights=(float(weights[0]), float(weights[1])),
        history=history,
    )


def predict_records(head: TrainedHead, bundle: DatasetBundle, ids) -> dict[str, BinaryClass]:
    """Eval-mode predictions for the given record ids, keyed by id."""
    records = bundle.records_for(frozenset(ids))
    if not records:
        raise ValueError("no records to predict")
    x, _ = build_feature_matrix(records, head.channels, head.stats, bundle.embeddings)
    logits, _ = forward(head.params, x, mode="eval")
    return {
        r.id: (
            BinaryClass.INEFFICIENT if row[1] > row[0] else BinaryClass.EFFICIENT
        )
        for r, row in zip(records, logits)
    }


def evaluate_head(head: TrainedHead, bundle: DatasetBundle, ids) -> MetricReport:
    """Macro metrics of the head over the given record ids."""
    from effsense.evaluation.metrics import confusion, macro_metrics

    predictions = predict_records(head, bundle, ids)
    records = bundle.records_for(frozenset(ids))
    truth = [r.binary for r in records]
    preds = [predictions[r.id] for r in records]
    return macro_metrics(confusion(truth, preds))
