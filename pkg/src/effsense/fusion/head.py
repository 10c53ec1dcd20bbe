"""Linear and one-hidden-layer MLP heads with explicit forward/backward.

Both heads emit two logits (Efficient, Inefficient).  The MLP has a single
8-unit ReLU hidden layer with inverted dropout during training.  All
arithmetic is float64; gradients are exact, not approximated, so they can
be reused verbatim by integrated-gradients attribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from effsense.dataset.types import BinaryClass

HIDDEN_WIDTH = 8
N_CLASSES = 2

_PARAM_SHAPES = {
    "linear": {"W": 2, "b": 1},
    "mlp": {"W1": 2, "b1": 1, "W2": 2, "b2": 1},
}


class StaleCacheError(ValueError):
    """Forward cache does not match the parameters handed to backward."""


@dataclass
class HeadParameters:
    """Named parameter arrays for one head.

    Linear: ``W`` (2, d) and ``b`` (2,).  MLP: ``W1`` (8, d), ``b1`` (8,),
    ``W2`` (2, 8), ``b2`` (2,).
    """

    head_kind: str
    arrays: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        if self.head_kind not in _PARAM_SHAPES:
            raise ValueError(f"unknown head kind {self.head_kind!r}")
        expected = _PARAM_SHAPES[self.head_kind]
        if set(self.arrays) != set(expected):
            raise ValueError(
                f"{self.head_kind} head expects parameters {sorted(expected)}, "
                f"got {sorted(self.arrays)}"
            )
        arrays = {
            name: np.ascontiguousarray(arr, dtype=np.float64)
            for name, arr in self.arrays.items()
        }
        for name, arr in arrays.items():
            if arr.ndim != expected[name]:
                raise ValueError(f"parameter {name} must be {expected[name]}-D")
        if self.head_kind == "linear":
            if arrays["W"].shape[0] != N_CLASSES or arrays["b"].shape != (N_CLASSES,):
                raise ValueError("linear head: W must be (2, d), b must be (2,)")
        else:
            d = arrays["W1"].shape[1]
            if (
                arrays["W1"].shape != (HIDDEN_WIDTH, d)
                or arrays["b1"].shape != (HIDDEN_WIDTH,)
                or arrays["W2"].shape != (N_CLASSES, HIDDEN_WIDTH)
                or arrays["b2"].shape != (N_CLASSES,)
            ):
                raise ValueError("mlp head: bad parameter shapes")
        self.arrays = arrays

    @property
    def dim(self) -> int:
        key = "W" if self.head_kind == "linear" else "W1"
        return int(self.arrays[key].shape[1])

    def copy(self) -> "HeadParameters":
        return HeadParameters(
            head_kind=self.head_kind,
            arrays={name: arr.copy() for name, arr in self.arrays.items()},
        )


def init_head_params(
    head_kind: str, dim: int, rng: np.random.Generator
) -> HeadParameters:
    """Seeded init: weights uniform in +-1/sqrt(fan_in), biases zero."""
    if dim < 1:
        raise ValueError("input dimension must be at least 1")
    if head_kind == "linear":
        bound = 1.0 / np.sqrt(dim)
        arrays = {
            "W": rng.uniform(-bound, bound, size=(N_CLASSES, dim)),
            "b": np.zeros(N_CLASSES),
        }
    elif head_kind == "mlp":
        bound1 = 1.0 / np.sqrt(dim)
        bound2 = 1.0 / np.sqrt(HIDDEN_WIDTH)
        arrays = {
            "W1": rng.uniform(-bound1, bound1, size=(HIDDEN_WIDTH, dim)),
            "b1": np.zeros(HIDDEN_WIDTH),
            "W2": rng.uniform(-bound2, bound2, size=(N_CLASSES, HIDDEN_WIDTH)),
            "b2": np.zeros(N_CLASSES),
        }
    else:
        raise ValueError(f"unknown head kind {head_kind!r}")
    return HeadParameters(head_kind=head_kind, arrays=arrays)


@dataclass
class ForwardCache:
    """Activations saved by forward for the matching backward call."""

    head_kind: str
    dim: int
    x: np.ndarray                       # (B, d)
    single: bool                        # input was 1-D
    hidden_pre: np.ndarray | None = None    # (B, 8) before ReLU
    hidden_out: np.ndarray | None = None    # (B, 8) after ReLU and dropout
    drop_scale: np.ndarray | None = None    # (B, 8) mask / keep_prob, train only


def forward(
    params: HeadParameters,
    x: np.ndarray,
    mode: str = "eval",
    rng: np.random.Generator | None = None,
    dropout_p: float = 0.5,
) -> tuple[np.ndarray, ForwardCache]:
    """Compute logits for one vector (d,) or a batch (B, d).

    In train mode the MLP applies inverted dropout to the hidden layer:
    units are kept with probability 1 - dropout_p and scaled by its
    inverse, so eval needs no rescaling.  Train-mode MLP calls require a
    generator.
    """
    if mode not in ("train", "eval"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "train" and not (0.0 <= dropout_p < 1.0):
        raise ValueError("dropout_p must be in [0, 1)")
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2:
        raise ValueError("input must be 1-D or 2-D")
    if batch.shape[1] != params.dim:
        raise ValueError(
            f"input dimension {batch.shape[1]} does not match head dimension {params.dim}"
        )
    cache = ForwardCache(
        head_kind=params.head_kind, dim=params.dim, x=batch, single=single
    )
    if params.head_kind == "linear":
        logits = batch @ params.arrays["W"].T + params.arrays["b"]
    else:
        hidden_pre = batch @ params.arrays["W1"].T + params.arrays["b1"]
        hidden = np.maximum(hidden_pre, 0.0)
        if mode == "train" and dropout_p > 0.0:
            if rng is None:
                raise ValueError("train-mode dropout needs a random generator")
            keep = rng.random(hidden.shape) >= dropout_p
            scale = keep / (1.0 - dropout_p)
            hidden = hidden * scale
            cache.drop_scale = scale
        cache.hidden_pre = hidden_pre
        cache.hidden_out = hidden
        logits = hidden @ params.arrays["W2"].T + params.arrays["b2"]
    return (logits[0] if single else logits), cache


def weighted_cross_entropy(
    logits: np.ndarray,
    label: int | np.ndarray,
    class_weights: np.ndarray,
) -> tuple[float | np.ndarray, np.ndarray]:
    """Class-weighted cross entropy and its logit gradient.

    Uses the log-sum-exp form for stability.  The gradient of a sample is
    ``w[y] * (softmax(logits) - onehot(y))``.  For a batch the returned
    losses and gradients are per sample; reductions are the caller's job.
    """
    logits = np.asarray(logits, dtype=np.float64)
    weights = np.asarray(class_weights, dtype=np.float64)
    if weights.shape != (N_CLASSES,):
        raise ValueError("class_weights must have one weight per class")
    if np.any(weights < 0):
        raise ValueError("class weights must be non-negative")
    single = logits.ndim == 1
    z = logits[None, :] if single else logits
    labels = np.atleast_1d(np.asarray(label, dtype=np.int64))
    if z.shape[0] != labels.shape[0]:
        raise ValueError("one label per logit row required")
    if np.any((labels < 0) | (labels >= N_CLASSES)):
        raise ValueError("labels must be 0 or 1")
    m = z.max(axis=1, keepdims=True)
    log_norm = m[:, 0] + np.log(np.exp(z - m).sum(axis=1))
    log_probs = z - log_norm[:, None]
    sample_w = weights[labels]
    losses = -sample_w * log_probs[np.arange(z.shape[0]), labels]
    grads = np.exp(log_probs)
    grads[np.arange(z.shape[0]), labels] -= 1.0
    grads *= sample_w[:, None]
    if single:
        return float(losses[0]), grads[0]
    return losses, grads


def backward(
    params: HeadParameters, cache: ForwardCache, dlogits: np.ndarray
) -> dict[str, np.ndarray]:
    """Exact parameter gradients plus the input gradient under key ``x``.

    For batches, per-sample contributions are summed; fold any 1/B into
    ``dlogits`` before calling.  Raises StaleCacheError when the cache was
    produced by a different head shape.
    """
    if cache.head_kind != params.head_kind or cache.dim != params.dim:
        raise StaleCacheError(
            f"cache built for {cache.head_kind}/dim={cache.dim}, "
            f"parameters are {params.head_kind}/dim={params.dim}"
        )
    dlogits = np.asarray(dlogits, dtype=np.float64)
    dl = dlogits[None, :] if dlogits.ndim == 1 else dlogits
    if dl.shape != (cache.x.shape[0], N_CLASSES):
        raise StaleCacheError(
            f"logit gradient shape {dl.shape} does not match cached batch "
            f"of {cache.x.shape[0]}"
        )
    grads: dict[str, np.ndarray] = {}
    if params.head_kind == "linear":
        grads["W"] = dl.T @ cache.x
        grads["b"] = dl.sum(axis=0)
        dx = dl @ params.arrays["W"]
    else:
        if cache.hidden_pre is None or cache.hidden_out is None:
            raise StaleCacheError("mlp cache is missing hidden activations")
        grads["W2"] = dl.T @ cache.hidden_out
        grads["b2"] = dl.sum(axis=0)
        dhidden = dl @ params.arrays["W2"]
        if cache.drop_scale is not None:
            dhidden = dhidden * cache.drop_scale
        dpre = dhidden * (cache.hidden_pre > 0.0)
        grads["W1"] = dpre.T @ cache.x
        grads["b1"] = dpre.sum(axis=0)
        dx = dpre @ params.arrays["W1"]
    grads["x"] = dx[0] if cache.single else dx
    return grads


@dataclass
class AdamState:
    """First/second moment accumulators and the step counter."""

    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_params(cls, params: HeadParameters) -> "AdamState":
        return cls(
            step=0,
            m={k: np.zeros_like(a) for k, a in params.arrays.items()},
            v={k: np.zeros_like(a) for k, a in params.arrays.items()},
        )


def adam_step(
    params: HeadParameters,
    grads: dict[str, np.ndarray],
    state: AdamState,
    learning_rate: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[HeadParameters, AdamState]:
    """One bias-corrected Adam update, in place on params and state."""
    state.step += 1
    t = state.step
    for name, value in params.arrays.items():
        if name not in grads:
            raise ValueError(f"missing gradient for parameter {name}")
        g = np.asarray(grads[name], dtype=np.float64)
        if g.shape != value.shape:
            raise ValueError(f"gradient shape mismatch for parameter {name}")
        if not np.isfinite(g).all():
            raise ValueError(f"non-finite gradient for parameter {name}")
        state.m[name] = beta1 * state.m[name] + (1.0 - beta1) * g
        state.v[name] = beta2 * state.v[name] + (1.0 - beta2) * g * g
        m_hat = state.m[name] / (1.0 - beta1**t)
        v_hat = state.v[name] / (1.0 - beta2**t)
        value -= learning_rate * m_hat / (np.sqrt(v_hat) + eps)
    return params, state


def predict(
    params: HeadParameters, x: np.ndarray
) -> tuple[BinaryClass, np.ndarray]:
    """Eval-mode class decision for one vector; ties go to Efficient."""
    logits, _ = forward(params, x, mode="eval")
    cls = (
        BinaryClass.INEFFICIENT
        if logits[1] > logits[0]
        else BinaryClass.EFFICIENT
    )
    return cls, logits
