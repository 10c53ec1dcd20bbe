"""Head training: learning, determinism, checkpointing, persistence."""

from dataclasses import replace

import numpy as np
import pytest

from effsense.dataset.ingest import DatasetBundle
from effsense.dataset.types import FeatureChannel
from effsense.fusion.store import load_head, save_head
from effsense.fusion.train import (
    TrainConfig,
    evaluate_head,
    predict_records,
    train_head,
)

from conftest import separable_bundle

SV = FeatureChannel.SV
LST = FeatureChannel.LST


FAST = TrainConfig(learning_rate=0.02, batch_size=8, epochs=60, dropout_p=0.0, seed=3)


@pytest.mark.parametrize("head_kind", ["linear", "mlp"])
def test_training_learns_separable_data(head_kind):
    bundle = separable_bundle()
    head = train_head(bundle, [SV, LST], head_kind, FAST)
    report = evaluate_head(head, bundle, bundle.split.test)
    assert report.macro_f1 == 1.0
    assert head.params.head_kind == head_kind
    assert head.channels == (SV, LST)
    assert len(head.history.train_loss) == FAST.epochs
    # Loss should come down substantially on this easy problem.
    assert head.history.train_loss[-1] < head.history.train_loss[0] / 2


def test_training_is_deterministic():
    bundle = separable_bundle()
    a = train_head(bundle, [SV], "mlp", FAST)
    b = train_head(bundle, [SV], "mlp", FAST)
    for name in a.params.arrays:
        np.testing.assert_array_equal(a.params.arrays[name], b.params.arrays[name])
    assert a.history == b.history
    other = train_head(bundle, [SV], "mlp", replace(FAST, seed=4))
    assert other.history.rng_fingerprint != a.history.rng_fingerprint


def test_best_epoch_is_earliest_argmax_of_val_f1():
    bundle = separable_bundle()
    head = train_head(bundle, [SV, LST], "linear", FAST)
    curve = head.history.val_macro_f1
    best = max(curve)
    assert head.history.best_epoch == curve.index(best)


def test_default_class_weights_are_inverse_frequency():
    bundle = separable_bundle(n=40, efficient_share=0.75)
    head = train_head(bundle, [SV], "linear", FAST)
    train_records = bundle.records_for(bundle.split.train)
    n_eff = sum(1 for r in train_records if int(r.binary) == 0)
    n_ineff = len(train_records) - n_eff
    total = len(train_records)
    assert head.class_weights[0] == pytest.approx(total / (2 * n_eff))
    assert head.class_weights[1] == pytest.approx(total / (2 * n_ineff))


def test_explicit_weights_and_stats_pass_through():
    bundle = separable_bundle()
    stats_head = train_head(bundle, [LST], "linear", FAST)
    config = TrainConfig(
        learning_rate=0.01,
        batch_size=8,
        epochs=3,
        dropout_p=0.0,
        seed=3,
        class_weights=(0.5, 2.0),
        scalar_stats=stats_head.stats,
    )
    head = train_head(bundle, [LST], "linear", config)
    assert head.class_weights == (0.5, 2.0)
    assert head.stats is stats_head.stats


def test_train_requires_split():
    bundle = separable_bundle()
    bare = DatasetBundle(records=bundle.records, embeddings=bundle.embeddings)
    with pytest.raises(ValueError):
        train_head(bare, [SV], "linear", FAST)


def test_predict_records_keys_and_values():
    bundle = separable_bundle()
    head = train_head(bundle, [SV, LST], "linear", FAST)
    preds = predict_records(head, bundle, bundle.split.test)
    assert set(preds) == set(bundle.split.test)
    for rid, cls in preds.items():
        assert cls == bundle.record_by_id(rid).binary
    with pytest.raises(ValueError):
        predict_records(head, bundle, frozenset())


def test_save_load_round_trip(tmp_path):
    bundle = separable_bundle()
    head = train_head(bundle, [SV, LST], "mlp", FAST)
    save_head(head, tmp_path)
    loaded = load_head(tmp_path)
    assert loaded.params.head_kind == "mlp"
    assert loaded.channels == head.channels
    assert loaded.class_weights == head.class_weights
    assert loaded.history == head.history
    assert loaded.stats.mean == head.stats.mean
    for name, arr in head.params.arrays.items():
        np.testing.assert_array_equal(
            loaded.params.arrays[name], arr.astype(np.float32).astype(np.float64)
        )
    # Predictions agree between the trained and reloaded heads.
    before = predict_records(head, bundle, bundle.split.test)
    after = predict_records(loaded, bundle, bundle.split.test)
    assert before == after
