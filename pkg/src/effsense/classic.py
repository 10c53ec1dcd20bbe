"""Classical baselines: majority class, k-nearest-neighbour, linear SVM,
and logistic regression, plus raw-pixel flattening and a small grid search.

The SVM is the primal formulation trained with per-sample subgradient
descent on the class-weighted hinge loss with an L2 penalty of
``||w||^2 / (2 * C * n)``; inefficient buildings are the +1 class.  All
training is deterministic given the config seed.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from effsense.dataset.embeddings import EmbeddingMatrix, read_embeddings, write_embeddings
from effsense.dataset.ingest import write_json
from effsense.dataset.labels import class_weights as inverse_class_weights
from effsense.dataset.types import BinaryClass
from effsense.evaluation.metrics import MetricReport, confusion, macro_metrics
from effsense.imutil import bilinear_resize

SVM_C_GRID = tuple(10.0**e for e in range(-4, 4))

_CONVERGENCE_RTOL = 1e-10


@dataclass(frozen=True)
class ClassifierConfig:
    """Shared configuration for the baseline fitters."""

    kind: str = "svm"
    knn_k: int = 3
    svm_c: float = 1.0
    learning_rate: float = 1e-3
    max_epochs: int = 10_000
    sgd_epochs: int = 200
    class_weighted: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("majority", "knn", "svm", "logreg"):
            raise ValueError(f"unknown classifier kind {self.kind!r}")
        if self.knn_k < 1:
            raise ValueError("knn_k must be at least 1")
        if not (self.svm_c > 0):
            raise ValueError("svm_c must be positive")
        if not (self.learning_rate > 0):
            raise ValueError("learning_rate must be positive")
        if self.max_epochs < 1 or self.sgd_epochs < 1:
            raise ValueError("epoch caps must be at least 1")


def _check_features(x: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("features must be a non-empty (N, d) matrix")
    if not np.isfinite(x).all():
        raise ValueError("features must be finite")
    if y is not None and y.shape[0] != x.shape[0]:
        raise ValueError("one label per feature row required")
    return x


def _check_labels(y: Sequence[BinaryClass | int]) -> np.ndarray:
    arr = np.asarray([int(v) for v in y], dtype=np.int64)
    if arr.size == 0:
        raise ValueError("no labels")
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("labels must be 0 (efficient) or 1 (inefficient)")
    return arr


class FittedClassifier:
    """Base interface: a fitted model that predicts binary classes."""

    kind: str

    def predict(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass
class MajorityModel(FittedClassifier):
    """Predicts the most common training class; ties go to Efficient."""

    majority: BinaryClass
    counts: tuple[int, int]
    kind: str = "majority"

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = _check_features(x)
        return np.full(x.shape[0], int(self.majority), dtype=np.int64)


@dataclass
class KnnModel(FittedClassifier):
    """k-nearest-neighbour voting, Euclidean metric.

    Distance ties resolve to the lower training row index; vote ties
    resolve to Efficient.
    """

    train_x: np.ndarray
    train_y: np.ndarray
    k: int
    kind: str = "knn"

    def neighbors(self, query: np.ndarray) -> list[tuple[int, float]]:
        query = np.asarray(query, dtype=np.float64)
        if query.shape != (self.train_x.shape[1],):
            raise ValueError(
                f"query dim {query.shape} does not match training dim "
                f"{self.train_x.shape[1]}"
            )
        dists = np.sqrt(((self.train_x - query) ** 2).sum(axis=1))
        order = np.argsort(dists, kind="stable")[: self.k]
        return [(int(i), float(dists[i])) for i in order]

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = _check_features(x)
        out = np.empty(x.shape[0], dtype=np.int64)
        for row, query in enumerate(x):
            votes = [self.train_y[i] for i, _ in self.neighbors(query)]
            out[row] = 1 if sum(votes) * 2 > len(votes) else 0
        return out


@dataclass
class LinearModel(FittedClassifier):
    """Linear decision function w.x + b; positive scores mean Inefficient."""

    weights: np.ndarray
    bias: float
    kind: str
    metadata: dict = field(default_factory=dict)

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        x = _check_features(x)
        if x.shape[1] != self.weights.shape[0]:
            raise ValueError("feature dimension does not match the model")
        return x @ self.weights + self.bias

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.decision_function(x) > 0).astype(np.int64)

    def predict_scores(self, x: np.ndarray) -> np.ndarray:
        """Class probabilities [P(efficient), P(inefficient)] per row."""
        if self.kind != "logreg":
            raise ValueError("probabilities are only defined for logistic models")
        p = _sigmoid(self.decision_function(x))
        return np.stack([1.0 - p, p], axis=1)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def fit_majority(labels: Sequence[BinaryClass | int]) -> MajorityModel:
    y = _check_labels(labels)
    n_ineff = int(y.sum())
    n_eff = int(y.size - n_ineff)
    majority = BinaryClass.INEFFICIENT if n_ineff > n_eff else BinaryClass.EFFICIENT
    return MajorityModel(majority=majority, counts=(n_eff, n_ineff))


def fit_knn(
    x: np.ndarray, labels: Sequence[BinaryClass | int], config: ClassifierConfig
) -> KnnModel:
    y = _check_labels(labels)
    x = _check_features(x, y)
    if config.knn_k > x.shape[0]:
        raise ValueError(f"k={config.knn_k} exceeds {x.shape[0]} training rows")
    return KnnModel(train_x=x.copy(), train_y=y.copy(), k=config.knn_k)


def _sample_weights(y: np.ndarray, class_weighted: bool) -> np.ndarray:
    if not class_weighted:
        return np.ones(y.size)
    by_class = inverse_class_weights([BinaryClass(int(v)) for v in y])
    return np.where(
        y == 1,
        by_class[BinaryClass.INEFFICIENT],
        by_class[BinaryClass.EFFICIENT],
    )


def fit_svm(
    x: np.ndarray, labels: Sequence[BinaryClass | int], config: ClassifierConfig
) -> LinearModel:
    """Primal linear SVM via seeded per-sample subgradient descent.

    Runs at most ``max_epochs`` passes, stopping early once the epoch
    objective stops moving (relative change below 1e-10).
    """
    y = _check_labels(labels)
    x = _check_features(x, y)
    n, d = x.shape
    target = np.where(y == 1, 1.0, -1.0)
    sw = _sample_weights(y, config.class_weighted)
    penalty = 1.0 / (2.0 * config.svm_c * n)
    w = np.zeros(d)
    b = 0.0
    rng = np.random.default_rng(config.seed)
    lr = config.learning_rate
    prev_obj = None
    epochs_run = 0
    for _ in range(config.max_epochs):
        for i in rng.permutation(n):
            margin = target[i] * (x[i] @ w + b)
            gw = w * (2.0 * penalty)
            gb = 0.0
            if margin < 1.0:
                gw = gw - sw[i] * target[i] * x[i]
                gb = -sw[i] * target[i]
            w -= lr * gw
            b -= lr * gb
        epochs_run += 1
        margins = target * (x @ w + b)
        hinge = np.maximum(0.0, 1.0 - margins)
        obj = float((sw * hinge).mean() + penalty * (w @ w))
        if prev_obj is not None and abs(prev_obj - obj) <= _CONVERGENCE_RTOL * max(
            1.0, abs(prev_obj)
        ):
            break
        prev_obj = obj
    return LinearModel(
        weights=w,
        bias=float(b),
        kind="svm",
        metadata={
            "seed": config.seed,
            "svm_c": config.svm_c,
            "epochs_run": epochs_run,
            "objective": obj,
            "class_weighted": config.class_weighted,
        },
    )


def fit_logreg(
    x: np.ndarray, labels: Sequence[BinaryClass | int], config: ClassifierConfig
) -> LinearModel:
    """Logistic regression via seeded SGD on the unweighted log loss."""
    y = _check_labels(labels)
    x = _check_features(x, y)
    n, d = x.shape
    t = y.astype(np.float64)
    w = np.zeros(d)
    b = 0.0
    rng = np.random.default_rng(config.seed)
    lr = config.learning_rate
    for _ in range(config.sgd_epochs):
        for i in rng.permutation(n):
            p = _sigmoid(np.asarray(x[i] @ w + b))
            g = float(p - t[i])
            w -= lr * g * x[i]
            b -= lr * g
    return LinearModel(
        weights=w,
        bias=float(b),
        kind="logreg",
        metadata={"seed": config.seed, "epochs_run": config.sgd_epochs},
    )


def fit_classifier(
    x: np.ndarray | None,
    labels: Sequence[BinaryClass | int],
    config: ClassifierConfig,
) -> FittedClassifier:
    """Dispatch to the fitter named by ``config.kind``."""
    if config.kind == "majority":
        return fit_majority(labels)
    if x is None:
        raise ValueError(f"{config.kind} needs feature vectors")
    if config.kind == "knn":
        return fit_knn(x, labels, config)
    if config.kind == "svm":
        return fit_svm(x, labels, config)
    return fit_logreg(x, labels, config)


def flatten_image(image: np.ndarray, downscale_to: int | None = None) -> np.ndarray:
    """Flatten an (H, W, 3) uint8 image to a float64 vector in [0, 1].

    With ``downscale_to`` the image is first bilinearly resized to a square
    of that side.  Values stay channel-interleaved row-major, matching the
    memory order of the input.
    """
    data = np.asarray(image)
    if data.ndim != 3 or data.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) image")
    if data.dtype != np.uint8:
        raise ValueError("expected uint8 pixels")
    values = data.astype(np.float64)
    if downscale_to is not None:
        if downscale_to < 1:
            raise ValueError("downscale_to must be positive")
        values = bilinear_resize(values, downscale_to, downscale_to)
    return (values / 255.0).reshape(-1)


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a validation-set grid search."""

    best_config: ClassifierConfig
    best_report: MetricReport
    per_candidate: tuple[tuple[ClassifierConfig, MetricReport], ...]


def hyperparam_search(
    candidates: Sequence[ClassifierConfig],
    x_train: np.ndarray,
    y_train: Sequence[BinaryClass | int],
    x_val: np.ndarray,
    y_val: Sequence[BinaryClass | int],
) -> SearchResult:
    """Fit every candidate and keep the best validation macro-F1.

    Ties keep the earliest candidate, so grids should be listed in
    preference order.
    """
    if not candidates:
        raise ValueError("no candidate configurations")
    results = []
    truth = [BinaryClass(int(v)) for v in y_val]
    for config in candidates:
        model = fit_classifier(x_train, y_train, config)
        preds = [BinaryClass(int(v)) for v in model.predict(x_val)]
        results.append((config, macro_metrics(confusion(truth, preds))))
    best_config, best_report = results[0]
    for config, report in results[1:]:
        if report.macro_f1 > best_report.macro_f1:
            best_config, best_report = config, report
    return SearchResult(
        best_config=best_config,
        best_report=best_report,
        per_candidate=tuple(results),
    )


def svm_c_grid(base: ClassifierConfig | None = None) -> list[ClassifierConfig]:
    """The standard C grid (1e-4 through 1e3) over a base SVM config."""
    base = base or ClassifierConfig(kind="svm")
    return [replace(base, kind="svm", svm_c=c) for c in SVM_C_GRID]


def save_classifier(model: FittedClassifier, directory: str | Path) -> Path:
    """Write a classifier as classifier.json plus EMB1 parameter blobs."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    doc: dict = {"kind": model.kind}
    if isinstance(model, MajorityModel):
        doc["majority"] = int(model.majority)
        doc["counts"] = list(model.counts)
    elif isinstance(model, KnnModel):
        doc["k"] = model.k
        doc["labels"] = [int(v) for v in model.train_y]
        matrix = EmbeddingMatrix(
            ids=tuple(str(i) for i in range(model.train_x.shape[0])),
            data=model.train_x.astype(np.float32),
        )
        write_embeddings(matrix, directory / "train.emb")
        doc["train_file"] = "train.emb"
    elif isinstance(model, LinearModel):
        doc["bias"] = model.bias
        doc["metadata"] = model.metadata
        matrix = EmbeddingMatrix(
            ids=("w",), data=model.weights.astype(np.float32)[None, :]
        )
        write_embeddings(matrix, directory / "weights.emb")
        doc["weights_file"] = "weights.emb"
    else:
        raise ValueError(f"cannot save classifier of type {type(model).__name__}")
    path = directory / "classifier.json"
    write_json(path, doc)
    return path


def load_classifier(directory: str | Path) -> FittedClassifier:
    """Load a classifier saved by save_classifier."""
    directory = Path(directory)
    doc = json.loads((directory / "classifier.json").read_text(encoding="utf-8"))
    kind = doc["kind"]
    if kind == "majority":
        return MajorityModel(
            majority=BinaryClass(doc["majority"]), counts=tuple(doc["counts"])
        )
    if kind == "knn":
        matrix = read_embeddings(directory / doc["train_file"])
        return KnnModel(
            train_x=matrix.data.astype(np.float64),
            train_y=np.asarray(doc["labels"], dtype=np.int64),
            k=int(doc["k"]),
        )
    if kind in ("svm", "logreg"):
        matrix = read_embeddings(directory / doc["weights_file"])
        return LinearModel(
            weights=matrix.data[0].astype(np.float64),
            bias=float(doc["bias"]),
            kind=kind,
            metadata=doc.get("metadata", {}),
        )
    raise ValueError(f"unknown classifier kind {kind!r}")
