"""Confusion matrices and macro-averaged precision, recall, and F1.

Counts are integers, so every ratio here is rational.  The per-class and
macro values are computed with exact rational arithmetic and converted to
float once, which keeps them reproducible to the last bit and avoids any
ambiguity in the zero-division convention: an undefined ratio scores 0 and
is flagged, it never raises.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from effsense.dataset.types import BinaryClass

_CLASS_ORDER = (BinaryClass.EFFICIENT, BinaryClass.INEFFICIENT)


@dataclass(frozen=True)
class ConfusionMatrix:
    """2x2 counts indexed [true class][predicted class], Efficient first."""

    counts: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in row) for row in self.counts)
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError("confusion matrix must be 2x2")
        if any(v < 0 for row in rows for v in row):
            raise ValueError("confusion counts must be non-negative")
        object.__setattr__(self, "counts", rows)

    @property
    def total(self) -> int:
        return sum(v for row in self.counts for v in row)

    def support(self, cls: BinaryClass) -> int:
        return sum(self.counts[int(cls)])


def confusion(
    y_true: Sequence[BinaryClass], y_pred: Sequence[BinaryClass]
) -> ConfusionMatrix:
    """Count (true, predicted) pairs."""
    if len(y_true) != len(y_pred):
        raise ValueError("y_true and y_pred lengths differ")
    if not y_true:
        raise ValueError("cannot build a confusion matrix from no samples")
    counts = [[0, 0], [0, 0]]
    for t, p in zip(y_true, y_pred):
        counts[int(BinaryClass(t))][int(BinaryClass(p))] += 1
    return ConfusionMatrix(tuple(tuple(row) for row in counts))


@dataclass(frozen=True)
class MetricReport:
    """Per-class and macro metrics, stored as fractions in [0, 1].

    ``zero_division_flags`` names every ratio whose denominator was zero,
    e.g. ``precision[EFFICIENT]``; those ratios score 0 by convention.
    Rendering to percent happens only in the report layer.
    """

    precision: tuple[float, float]
    recall: tuple[float, float]
    f1: tuple[float, float]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    support: tuple[int, int]
    zero_division_flags: tuple[str, ...] = ()


def _ratio(
    numerator: int, denominator: int, flag: str, flags: list[str]
) -> Fraction:
    if denominator == 0:
        flags.append(flag)
        return Fraction(0)
    return Fraction(numerator, denominator)


def macro_metrics(matrix: ConfusionMatrix) -> MetricReport:
    """Per-class precision/recall/F1 and their unweighted macro means.

    For class c: precision = TP/(TP+FP), recall = TP/(TP+FN), F1 is their
    harmonic mean (0 when precision + recall is 0).  Macro values average
    the two classes with equal weight.
    """
    if matrix.total == 0:
        raise ValueError("confusion matrix has no samples")
    flags: list[str] = []
    precisions: list[Fraction] = []
    recalls: list[Fraction] = []
    f1s: list[Fraction] = []
    for cls in _CLASS_ORDER:
        c = int(cls)
        tp = matrix.counts[c][c]
        fp = matrix.counts[1 - c][c]
        fn = matrix.counts[c][1 - c]
        p = _ratio(tp, tp + fp, f"precision[{cls.name}]", flags)
        r = _ratio(tp, tp + fn, f"recall[{cls.name}]", flags)
        if p + r == 0:
            f1 = Fraction(0)
        else:
            f1 = 2 * p * r / (p + r)
        precisions.append(p)
        recalls.append(r)
        f1s.append(f1)
    return MetricReport(
        precision=(float(precisions[0]), float(precisions[1])),
        recall=(float(recalls[0]), float(recalls[1])),
        f1=(float(f1s[0]), float(f1s[1])),
        macro_precision=float(sum(precisions) / 2),
        macro_recall=float(sum(recalls) / 2),
        macro_f1=float(sum(f1s) / 2),
        support=(matrix.support(BinaryClass.EFFICIENT), matrix.support(BinaryClass.INEFFICIENT)),
        zero_division_flags=tuple(flags),
    )


def delta_to_majority(report: MetricReport, majority: MetricReport) -> float:
    """Macro-F1 improvement over the majority baseline, in percentage points."""
    return (report.macro_f1 - majority.macro_f1) * 100.0


def render_delta(delta_ppt: float) -> str:
    """Render a delta with an explicit sign, two decimals; zero stays bare.

    The sign is decided after rounding, so -0.001 renders as ``0.00``
    rather than ``-0.00``.
    """
    rounded = round(delta_ppt, 2)
    if rounded == 0:
        return "0.00"
    return f"{rounded:+.2f}"
