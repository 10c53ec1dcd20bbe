"""Train/validation/test splitting: sizes, determinism, geographic holdout."""

import pytest

from effsense.dataset.split import DatasetSplit, split_dataset

from conftest import make_record


def records_over(geographies):
    out = []
    for i, geo in enumerate(geographies):
        out.append(make_record(f"b{i:03d}", geography=geo))
    return out


def test_counts_split_partitions_everything():
    recs = records_over(["leeds"] * 10)
    split = split_dataset(recs, seed=7, counts=(6, 2, 2))
    assert split.counts == (6, 2, 2)
    assert split.train | split.validation | split.test == {r.id for r in recs}
    assert split.train & split.validation == frozenset()
    assert split.train & split.test == frozenset()


def test_same_seed_same_split_different_seed_differs():
    recs = records_over(["leeds"] * 30)
    a = split_dataset(recs, seed=3, counts=(20, 5, 5))
    b = split_dataset(recs, seed=3, counts=(20, 5, 5))
    c = split_dataset(recs, seed=4, counts=(20, 5, 5))
    assert (a.train, a.validation, a.test) == (b.train, b.validation, b.test)
    assert a.train != c.train


def test_input_order_does_not_matter():
    recs = records_over(["leeds"] * 12)
    a = split_dataset(recs, seed=11, counts=(8, 2, 2))
    b = split_dataset(list(reversed(recs)), seed=11, counts=(8, 2, 2))
    assert (a.train, a.validation, a.test) == (b.train, b.validation, b.test)


def test_fractions_floor_train_and_val():
    recs = records_over(["leeds"] * 11)
    # floor(11 * 0.6) = 6, floor(11 * 0.2) = 2, remainder 3.
    split = split_dataset(recs, seed=0, fractions=(0.6, 0.2, 0.2))
    assert split.counts == (6, 2, 3)


def test_holdout_geography_fills_test_exactly():
    recs = records_over(["leeds"] * 7 + ["peterborough"] * 3)
    split = split_dataset(
        recs, seed=5, counts=(5, 2, 3), holdout_geography="peterborough"
    )
    assert split.test == {"b007", "b008", "b009"}
    assert split.holdout_geography == "peterborough"
    for part in (split.train, split.validation):
        assert all(rid < "b007" for rid in part)


def test_holdout_size_mismatch_rejected():
    recs = records_over(["leeds"] * 7 + ["peterborough"] * 3)
    with pytest.raises(ValueError):
        split_dataset(recs, seed=5, counts=(6, 2, 2), holdout_geography="peterborough")
    with pytest.raises(ValueError):
        split_dataset(recs, seed=5, counts=(5, 2, 3), holdout_geography="york")


def test_count_and_fraction_validation():
    recs = records_over(["leeds"] * 10)
    with pytest.raises(ValueError):
        split_dataset(recs, seed=0)
    with pytest.raises(ValueError):
        split_dataset(recs, seed=0, counts=(6, 2, 2), fractions=(0.6, 0.2, 0.2))
    with pytest.raises(ValueError):
        split_dataset(recs, seed=0, counts=(6, 2, 3))
    with pytest.raises(ValueError):
        split_dataset(recs, seed=0, fractions=(0.6, 0.2, 0.3))
    with pytest.raises(ValueError):
        split_dataset([], seed=0, counts=(0, 0, 0))


def test_duplicate_ids_rejected():
    recs = records_over(["leeds"] * 3)
    with pytest.raises(ValueError):
        split_dataset(recs + [recs[0]], seed=0, counts=(2, 1, 1))


def test_split_parts_must_be_disjoint():
    with pytest.raises(ValueError):
        DatasetSplit(
            train=frozenset({"a"}),
            validation=frozenset({"a"}),
            test=frozenset(),
            seed=0,
        )
