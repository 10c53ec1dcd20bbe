"""Synthetic dataset generation: labels, signal placement, determinism."""

import numpy as np
import pytest

from effsense.dataset.types import BinaryClass, EfficiencyLabel, FeatureChannel
from effsense.evaluation.synth import SynthConfig, synth_generate

SV = FeatureChannel.SV
LST = FeatureChannel.LST


def test_shape_ids_and_geography():
    bundle = synth_generate(SynthConfig(n_records=50, embedding_dim=8, seed=1))
    assert len(bundle.records) == 50
    assert bundle.records[0].id == "syn00000"
    assert bundle.records[-1].id == "syn00049"
    assert all(r.geography == "synthtown" for r in bundle.records)
    assert bundle.split is None
    for channel in (SV, FeatureChannel.AV, FeatureChannel.SEG_SV):
        emb = bundle.embeddings[channel]
        assert emb.dim == 8
        assert len(emb) == 50
        assert emb.ids == tuple(r.id for r in bundle.records)
    for i, r in enumerate(bundle.records):
        assert r.embedding_refs[SV] == i
        assert r.footprint_area >= 10.0 * 0.9  # squares of the clamped area
        assert r.energy_consumption is not None


def test_grades_match_binary_class():
    bundle = synth_generate(SynthConfig(n_records=300, seed=2))
    for r in bundle.records:
        if r.binary == BinaryClass.EFFICIENT:
            assert EfficiencyLabel.A <= r.label <= EfficiencyLabel.D
        else:
            assert EfficiencyLabel.E <= r.label <= EfficiencyLabel.G


def test_class_balance_is_respected():
    bundle = synth_generate(SynthConfig(n_records=2000, class_balance=0.65, seed=3))
    share = sum(
        1 for r in bundle.records if r.binary == BinaryClass.EFFICIENT
    ) / len(bundle.records)
    assert abs(share - 0.65) < 0.04


def test_scalar_signal_separates_classes():
    bundle = synth_generate(SynthConfig(n_records=2000, seed=4))
    lst_eff = [
        r.lst_value for r in bundle.records if r.binary == BinaryClass.EFFICIENT
    ]
    lst_ineff = [
        r.lst_value for r in bundle.records if r.binary == BinaryClass.INEFFICIENT
    ]
    # Default strength 2 at scale 2: means 8 and 12.
    assert np.mean(lst_eff) == pytest.approx(8.0, abs=0.3)
    assert np.mean(lst_ineff) == pytest.approx(12.0, abs=0.3)


def test_embedding_signal_separates_classes():
    bundle = synth_generate(SynthConfig(n_records=1000, embedding_dim=16, seed=5))
    emb = bundle.embeddings[SV].data.astype(np.float64)
    labels = np.array([int(r.binary) for r in bundle.records])
    gap = emb[labels == 1].mean(axis=0) - emb[labels == 0].mean(axis=0)
    # The shift lies along a unit direction with total strength 2.
    assert np.sqrt((gap * gap).sum()) == pytest.approx(2.0, abs=0.25)


def test_zero_signal_removes_separation():
    config = SynthConfig(
        n_records=1000,
        signal={c: 0.0 for c in FeatureChannel},
        embedding_dim=16,
        seed=6,
    )
    bundle = synth_generate(config)
    labels = np.array([int(r.binary) for r in bundle.records])
    lst = np.array([r.lst_value for r in bundle.records])
    assert abs(lst[labels == 1].mean() - lst[labels == 0].mean()) < 0.5
    emb = bundle.embeddings[SV].data.astype(np.float64)
    gap = emb[labels == 1].mean(axis=0) - emb[labels == 0].mean(axis=0)
    assert np.sqrt((gap * gap).sum()) < 0.5


def test_same_seed_is_bit_identical():
    config = SynthConfig(n_records=80, embedding_dim=8, seed=7)
    a = synth_generate(config)
    b = synth_generate(config)
    for channel in a.embeddings:
        assert a.embeddings[channel].data.tobytes() == b.embeddings[channel].data.tobytes()
    for ra, rb in zip(a.records, b.records):
        assert ra == rb
    c = synth_generate(SynthConfig(n_records=80, embedding_dim=8, seed=8))
    assert a.embeddings[SV].data.tobytes() != c.embeddings[SV].data.tobytes()


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(n_records=0)
    with pytest.raises(ValueError):
        SynthConfig(class_balance=1.0)
    with pytest.raises(ValueError):
        SynthConfig(noise=-1.0)
    with pytest.raises(ValueError):
        SynthConfig(embedding_dim=0)
    with pytest.raises(ValueError):
        SynthConfig(signal={SV: -2.0})
    assert SynthConfig().strength(LST) == 2.0
    assert SynthConfig(signal={LST: 0.5}).strength(LST) == 0.5
