"""Label binarization, multi-unit aggregation, and class weighting."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from effsense.dataset.types import BinaryClass, EfficiencyLabel


def binarize_label(label: EfficiencyLabel) -> BinaryClass:
    """Map grades A-D to EFFICIENT and E-G to INEFFICIENT."""
    if not isinstance(label, EfficiencyLabel):
        label = EfficiencyLabel(label)
    if label <= EfficiencyLabel.D:
        return BinaryClass.EFFICIENT
    return BinaryClass.INEFFICIENT


def aggregate_units(unit_labels: Iterable[EfficiencyLabel]) -> EfficiencyLabel:
    """Collapse per-unit grades to the building grade: the worst unit wins."""
    labels = [EfficiencyLabel(u) for u in unit_labels]
    if not labels:
        raise ValueError("cannot aggregate an empty list of unit grades")
    return max(labels)


def class_weights(labels: Sequence[BinaryClass]) -> dict[BinaryClass, float]:
    """Inverse-frequency class weights: ``w_c = N / (2 * n_c)``.

    Both classes must be present, otherwise the weight of the absent class
    is undefined.
    """
    total = len(labels)
    counts = {
        BinaryClass.EFFICIENT: 0,
        BinaryClass.INEFFICIENT: 0,
    }
    for label in labels:
        counts[BinaryClass(label)] += 1
    for cls, count in counts.items():
        if count == 0:
            raise ValueError(f"class {cls.name} has no examples; weights undefined")
    return {cls: total / (2.0 * count) for cls, count in counts.items()}
