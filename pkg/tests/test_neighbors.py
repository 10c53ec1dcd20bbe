"""Nearest-neighbour lookup against a quadratic-scan oracle."""

import numpy as np
import pytest

from effsense.cleaning.neighbors import nearest_neighbors


def oracle(query, data, k):
    scored = []
    for i, row in enumerate(data):
        d = float(np.sqrt(((row - query) ** 2).sum()))
        scored.append((d, i))
    scored.sort()  # distance first, then index: the documented tie order
    return [(i, d) for d, i in scored[:k]]


def test_hand_case():
    data = np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 0.0], [0.0, 2.0]])
    got = nearest_neighbors(np.array([0.0, 0.0]), data, k=3)
    assert got == [(0, 0.0), (2, 1.0), (3, 2.0)]


def test_ties_order_by_row_index():
    data = np.array([[1.0], [-1.0], [1.0]])
    got = nearest_neighbors(np.array([0.0]), data, k=3)
    assert [i for i, _ in got] == [0, 1, 2]
    assert all(d == 1.0 for _, d in got)


def test_matches_oracle_on_random_inputs():
    rng = np.random.default_rng(17)
    for _ in range(25):
        n = int(rng.integers(2, 40))
        d = int(rng.integers(1, 6))
        data = rng.normal(size=(n, d))
        query = rng.normal(size=d)
        k = int(rng.integers(1, n + 1))
        got = nearest_neighbors(query, data, k)
        want = oracle(query, data, k)
        assert [i for i, _ in got] == [i for i, _ in want]
        np.testing.assert_allclose(
            [dist for _, dist in got], [dist for _, dist in want], atol=1e-12
        )


def test_validation():
    data = np.zeros((3, 2))
    with pytest.raises(ValueError):
        nearest_neighbors(np.zeros(2), data, k=0)
    with pytest.raises(ValueError):
        nearest_neighbors(np.zeros(2), data, k=4)
    with pytest.raises(ValueError):
        nearest_neighbors(np.zeros(3), data, k=1)
    with pytest.raises(ValueError):
        nearest_neighbors(np.zeros(2), data, k=1, metric="cosine")
