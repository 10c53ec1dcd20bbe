"""Deterministic train/validation/test splitting with geographic holdout."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from effsense.dataset.records import BuildingRecord


@dataclass(frozen=True)
class DatasetSplit:
    """Disjoint id sets covering the full dataset."""

    train: frozenset[str]
    validation: frozenset[str]
    test: frozenset[str]
    seed: int
    holdout_geography: str | None = None

    def __post_init__(self) -> None:
        parts = (self.train, self.validation, self.test)
        total = sum(len(p) for p in parts)
        if len(self.train | self.validation | self.test) != total:
            raise ValueError("split parts must be disjoint")

    @property
    def counts(self) -> tuple[int, int, int]:
        return (len(self.train), len(self.validation), len(self.test))


def _resolve_counts(
    n: int,
    counts: Sequence[int] | None,
    fractions: Sequence[float] | None,
) -> tuple[int, int, int]:
    if (counts is None) == (fractions is None):
        raise ValueError("give exactly one of counts or fractions")
    if counts is not None:
        if len(counts) != 3 or any(c < 0 for c in counts):
            raise ValueError("counts must be three non-negative integers")
        if sum(counts) != n:
            raise ValueError(f"counts {tuple(counts)} do not sum to {n} records")
        return (int(counts[0]), int(counts[1]), int(counts[2]))
    if len(fractions) != 3 or any(f < 0 for f in fractions):
        raise ValueError("fractions must be three non-negative numbers")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions sum to {sum(fractions)}, expected 1")
    n_train = math.floor(n * fractions[0])
    n_val = math.floor(n * fractions[1])
    return (n_train, n_val, n - n_train - n_val)


def split_dataset(
    records: Sequence[BuildingRecord],
    seed: int,
    counts: Sequence[int] | None = None,
    fractions: Sequence[float] | None = None,
    holdout_geography: str | None = None,
) -> DatasetSplit:
    """Split records into train/validation/test id sets.

    Sizes come either from explicit ``counts`` (must sum to the record
    count) or from ``fractions`` (must sum to 1; train and validation are
    floored, test takes the remainder).  With ``holdout_geography``, every
    record from that geography goes to test, and the test size implied by
    counts or fractions must equal the holdout size.  The remaining ids are
    sorted, then shuffled with a seeded generator, so the same inputs and
    seed always produce the same split.
    """
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate record ids")
    n = len(ids)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    n_train, n_val, n_test = _resolve_counts(n, counts, fractions)

    if holdout_geography is not None:
        test_ids = [r.id for r in records if r.geography == holdout_geography]
        if not test_ids:
            raise ValueError(f"holdout geography {holdout_geography!r} has no records")
        if len(test_ids) != n_test:
            raise ValueError(
                f"holdout geography {holdout_geography!r} has {len(test_ids)} "
                f"records but the test split calls for {n_test}"
            )
        pool = sorted(set(ids) - set(test_ids))
    else:
        test_ids = []
        pool = sorted(ids)

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pool))
    shuffled = [pool[i] for i in order]
    train = shuffled[:n_train]
    validation = shuffled[n_train : n_train + n_val]
    if holdout_geography is None:
        test_ids = shuffled[n_train + n_val :]
    elif len(shuffled) != n_train + n_val:
        raise ValueError(
            "train and validation sizes do not cover the non-holdout records"
        )
    return DatasetSplit(
        train=frozenset(train),
        validation=frozenset(validation),
        test=frozenset(test_ids),
        seed=int(seed),
        holdout_geography=holdout_geography,
    )
