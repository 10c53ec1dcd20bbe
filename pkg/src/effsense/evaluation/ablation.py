"""Feature-subset ablations over the fusion heads.

Every trial trains from the same seed and config, varying only the feature
subset and head kind, so differences in the table reflect the features.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations

from effsense.dataset.ingest import DatasetBundle
from effsense.dataset.types import FeatureChannel
from effsense.evaluation.metrics import MetricReport
from effsense.fusion.features import canonical_channels
from effsense.fusion.train import TrainConfig, evaluate_head, train_head

# The four channels that drive the pair/triple/quadruple grid; EC joins
# only for the final five-channel row, and SegSV appears as a single.
_CORE = (
    FeatureChannel.SV,
    FeatureChannel.AV,
    FeatureChannel.LST,
    FeatureChannel.FP,
)


def table4_feature_subsets() -> tuple[frozenset[FeatureChannel], ...]:
    """The 18 ablation subsets: 6 singles, 6 pairs, 4 triples, 1 quadruple,
    and the quadruple plus energy consumption."""
    subsets: list[frozenset[FeatureChannel]] = [
        frozenset({channel}) for channel in FeatureChannel
    ]
    for size in (2, 3, 4):
        subsets.extend(frozenset(combo) for combo in combinations(_CORE, size))
    subsets.append(frozenset((*_CORE, FeatureChannel.EC)))
    return tuple(subsets)


@dataclass(frozen=True)
class AblationSpec:
    """Feature subsets, head kinds, and the shared training setup."""

    feature_subsets: tuple[frozenset[FeatureChannel], ...]
    head_kinds: tuple[str, ...] = ("linear", "mlp")
    train_config: TrainConfig = TrainConfig()
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.feature_subsets:
            raise ValueError("at least one feature subset is required")
        if any(not s for s in self.feature_subsets):
            raise ValueError("feature subsets must be non-empty")
        if len(set(self.feature_subsets)) != len(self.feature_subsets):
            raise ValueError("duplicate feature subsets")
        if not self.head_kinds:
            raise ValueError("at least one head kind is required")


@dataclass(frozen=True)
class AblationRow:
    head_kind: str
    channels: tuple[FeatureChannel, ...]
    report: MetricReport

    @property
    def features(self) -> str:
        return "+".join(c.tag for c in self.channels)


def run_ablation(bundle: DatasetBundle, spec: AblationSpec) -> list[AblationRow]:
    """Train and evaluate every (head, subset) trial on the test split.

    Rows are grouped by head kind in the given order; within a head kind
    they are grouped by subset size ascending and sorted by descending
    macro-F1 inside each size group.
    """
    if bundle.split is None:
        raise ValueError("bundle has no split")
    config = replace(spec.train_config, seed=spec.seed)
    rows: list[AblationRow] = []
    for head_kind in spec.head_kinds:
        trials: list[AblationRow] = []
        for subset in spec.feature_subsets:
            head = train_head(bundle, subset, head_kind, config)
            report = evaluate_head(head, bundle, bundle.split.test)
            trials.append(
                AblationRow(
                    head_kind=head_kind,
                    channels=canonical_channels(subset),
                    report=report,
                )
            )
        trials.sort(key=lambda row: (len(row.channels), -row.report.macro_f1))
        rows.extend(trials)
    return rows
