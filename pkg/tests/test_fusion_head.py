"""Head forward/backward, loss, finite-difference gradients, Adam."""

import numpy as np
import pytest

from effsense.dataset.types import BinaryClass
from effsense.fusion.head import (
    AdamState,
    HeadParameters,
    StaleCacheError,
    adam_step,
    backward,
    forward,
    init_head_params,
    predict,
    weighted_cross_entropy,
)


def linear_params(w=((1.0, 0.0), (0.0, 1.0)), b=(0.0, 0.0)):
    return HeadParameters(
        head_kind="linear", arrays={"W": np.asarray(w), "b": np.asarray(b)}
    )


def mlp_params(seed=0, dim=3):
    return init_head_params("mlp", dim, np.random.default_rng(seed))


def test_linear_forward_hand_case():
    params = linear_params(w=((1.0, 2.0), (3.0, 4.0)), b=(0.5, -0.5))
    logits, cache = forward(params, np.array([1.0, 1.0]))
    np.testing.assert_allclose(logits, [3.5, 6.5])
    assert cache.single
    batch_logits, _ = forward(params, np.array([[1.0, 1.0], [0.0, 0.0]]))
    np.testing.assert_allclose(batch_logits, [[3.5, 6.5], [0.5, -0.5]])


def test_mlp_eval_is_deterministic_and_relu_kicks_in():
    w1 = np.zeros((8, 1))
    w1[0, 0] = 1.0
    w1[1, 0] = -1.0
    params = HeadParameters(
        head_kind="mlp",
        arrays={
            "W1": w1,
            "b1": np.zeros(8),
            "W2": np.ones((2, 8)),
            "b2": np.zeros(2),
        },
    )
    # x = 2: unit 0 fires with 2, unit 1 is clipped at 0 -> logits [2, 2].
    logits, _ = forward(params, np.array([2.0]))
    np.testing.assert_allclose(logits, [2.0, 2.0])
    logits, _ = forward(params, np.array([-3.0]))
    np.testing.assert_allclose(logits, [3.0, 3.0])


def test_init_shapes_and_bounds():
    rng = np.random.default_rng(1)
    lin = init_head_params("linear", 9, rng)
    assert lin.arrays["W"].shape == (2, 9)
    assert np.all(np.abs(lin.arrays["W"]) <= 1.0 / 3.0)
    assert np.all(lin.arrays["b"] == 0.0)
    mlp = init_head_params("mlp", 4, rng)
    assert mlp.arrays["W1"].shape == (8, 4)
    assert mlp.arrays["W2"].shape == (2, 8)
    assert np.all(np.abs(mlp.arrays["W1"]) <= 0.5)
    assert np.all(np.abs(mlp.arrays["W2"]) <= 1.0 / np.sqrt(8))
    with pytest.raises(ValueError):
        init_head_params("linear", 0, rng)
    with pytest.raises(ValueError):
        init_head_params("tree", 3, rng)


def test_parameter_shape_validation():
    with pytest.raises(ValueError):
        HeadParameters(head_kind="linear", arrays={"W": np.zeros((3, 2)), "b": np.zeros(3)})
    with pytest.raises(ValueError):
        HeadParameters(head_kind="linear", arrays={"W": np.zeros((2, 2))})
    with pytest.raises(ValueError):
        HeadParameters(
            head_kind="mlp",
            arrays={
                "W1": np.zeros((4, 2)),
                "b1": np.zeros(4),
                "W2": np.zeros((2, 4)),
                "b2": np.zeros(2),
            },
        )


def test_dropout_train_mode():
    params = mlp_params(dim=2)
    x = np.array([0.7, -0.3])
    with pytest.raises(ValueError):
        forward(params, x, mode="train")  # no generator
    with pytest.raises(ValueError):
        forward(params, x, mode="train", rng=np.random.default_rng(0), dropout_p=1.0)
    # dropout_p = 0 needs no generator and equals eval.
    eval_logits, _ = forward(params, x)
    train_logits, _ = forward(params, x, mode="train", dropout_p=0.0)
    np.testing.assert_allclose(train_logits, eval_logits)
    # With p = 0.5, surviving units are scaled by 2 and the cache keeps the
    # mask; the same seed reproduces the same logits.
    a, cache = forward(params, x, mode="train", rng=np.random.default_rng(3))
    b, _ = forward(params, x, mode="train", rng=np.random.default_rng(3))
    np.testing.assert_array_equal(a, b)
    assert set(np.unique(cache.drop_scale)) <= {0.0, 2.0}


def test_weighted_cross_entropy_hand_values():
    # Equal logits, weight 1: loss is log 2 and the gradient is (p - y).
    loss, grad = weighted_cross_entropy(np.array([0.0, 0.0]), 1, np.array([1.0, 1.0]))
    assert loss == pytest.approx(np.log(2.0))
    np.testing.assert_allclose(grad, [0.5, -0.5])
    # Class weight scales both.
    loss_w, grad_w = weighted_cross_entropy(
        np.array([0.0, 0.0]), 1, np.array([1.0, 3.0])
    )
    assert loss_w == pytest.approx(3.0 * np.log(2.0))
    np.testing.assert_allclose(grad_w, 3.0 * grad)
    # Large logits stay finite thanks to the log-sum-exp form.
    loss_big, _ = weighted_cross_entropy(
        np.array([1000.0, 0.0]), 0, np.array([1.0, 1.0])
    )
    assert loss_big == pytest.approx(0.0, abs=1e-12)


def test_weighted_cross_entropy_batch():
    logits = np.array([[2.0, 0.0], [0.0, 2.0]])
    losses, grads = weighted_cross_entropy(logits, np.array([0, 1]), np.ones(2))
    assert losses.shape == (2,)
    assert grads.shape == (2, 2)
    np.testing.assert_allclose(losses[0], losses[1])
    with pytest.raises(ValueError):
        weighted_cross_entropy(logits, np.array([0]), np.ones(2))
    with pytest.raises(ValueError):
        weighted_cross_entropy(logits, np.array([0, 2]), np.ones(2))
    with pytest.raises(ValueError):
        weighted_cross_entropy(logits, 0, np.array([-1.0, 1.0]))


def numeric_grad(loss_fn, arr, h=1e-6):
    grad = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        orig = arr[idx]
        arr[idx] = orig + h
        plus = loss_fn()
        arr[idx] = orig - h
        minus = loss_fn()
        arr[idx] = orig
        grad[idx] = (plus - minus) / (2.0 * h)
        it.iternext()
    return grad


@pytest.mark.parametrize("head_kind", ["linear", "mlp"])
def test_backward_matches_finite_differences(head_kind):
    rng = np.random.default_rng(42)
    dim = 5
    params = init_head_params(head_kind, dim, rng)
    x = rng.normal(size=(4, dim))
    labels = np.array([0, 1, 1, 0])
    weights = np.array([0.8, 1.4])

    def loss_fn():
        logits, _ = forward(params, x)
        losses, _ = weighted_cross_entropy(logits, labels, weights)
        return float(losses.sum())

    logits, cache = forward(params, x)
    _, dlogits = weighted_cross_entropy(logits, labels, weights)
    grads = backward(params, cache, dlogits)
    for name, arr in params.arrays.items():
        approx = numeric_grad(loss_fn, arr)
        np.testing.assert_allclose(grads[name], approx, rtol=1e-6, atol=1e-9)


def test_backward_input_gradient_linear_closed_form():
    params = linear_params(w=((1.0, 2.0), (3.0, 4.0)))
    x = np.array([0.5, -0.5])
    _, cache = forward(params, x)
    dlogits = np.array([1.0, -1.0])
    grads = backward(params, cache, dlogits)
    # d(l0 - l1)/dx = W[0] - W[1] = (-2, -2).
    np.testing.assert_allclose(grads["x"], [-2.0, -2.0])


def test_backward_input_gradient_mlp_finite_difference():
    params = mlp_params(seed=7, dim=4)
    rng = np.random.default_rng(0)
    x = rng.normal(size=4) + 0.3
    dlogits = np.array([1.0, -1.0])

    def margin():
        logits, _ = forward(params, x)
        return float(logits[0] - logits[1])

    _, cache = forward(params, x)
    dx = backward(params, cache, dlogits)["x"]
    approx = numeric_grad(margin, x)
    np.testing.assert_allclose(dx, approx, rtol=1e-6, atol=1e-9)


def test_backward_stale_cache_detection():
    params = linear_params()
    other = mlp_params(dim=2)
    _, cache = forward(params, np.array([1.0, 2.0]))
    with pytest.raises(StaleCacheError):
        backward(other, cache, np.array([1.0, 0.0]))
    with pytest.raises(StaleCacheError):
        backward(params, cache, np.zeros((3, 2)))


def test_adam_two_hand_steps():
    # Scalar-like parameter with constant gradient 1: after bias correction
    # every early step moves by almost exactly -lr.
    params = linear_params(w=((0.0, 0.0), (0.0, 0.0)))
    state = AdamState.for_params(params)
    grads = {"W": np.ones((2, 2)), "b": np.zeros(2)}
    lr = 0.1
    adam_step(params, grads, state, learning_rate=lr)
    # m_hat = 1, v_hat = 1 -> step = lr / (1 + eps).
    expected = -lr / (1.0 + 1e-8)
    np.testing.assert_allclose(params.arrays["W"], np.full((2, 2), expected))
    assert state.step == 1
    adam_step(params, grads, state, learning_rate=lr)
    np.testing.assert_allclose(
        params.arrays["W"], np.full((2, 2), 2 * expected), rtol=1e-9
    )
    np.testing.assert_allclose(params.arrays["b"], np.zeros(2))


def test_adam_rejects_bad_gradients():
    params = linear_params()
    state = AdamState.for_params(params)
    with pytest.raises(ValueError):
        adam_step(params, {"W": np.ones((2, 2))}, state, learning_rate=0.1)
    with pytest.raises(ValueError):
        adam_step(
            params,
            {"W": np.full((2, 2), np.nan), "b": np.zeros(2)},
            state,
            learning_rate=0.1,
        )


def test_predict_tie_goes_to_efficient():
    params = linear_params(w=((1.0, 0.0), (1.0, 0.0)), b=(0.0, 0.0))
    cls, logits = predict(params, np.array([2.0, 5.0]))
    assert logits[0] == logits[1]
    assert cls == BinaryClass.EFFICIENT
    params = linear_params(w=((0.0, 0.0), (1.0, 0.0)))
    cls, _ = predict(params, np.array([2.0, 0.0]))
    assert cls == BinaryClass.INEFFICIENT
