"""Evaluation: confusion metrics, ablation grids, synthetic data, reports."""

from effsense.evaluation.ablation import (
    AblationRow,
    AblationSpec,
    run_ablation,
    table4_feature_subsets,
)
from effsense.evaluation.metrics import (
    ConfusionMatrix,
    MetricReport,
    confusion,
    delta_to_majority,
    macro_metrics,
    render_delta,
)
from effsense.evaluation.report import ReportRow, render_report
from effsense.evaluation.synth import SynthConfig, synth_generate

__all__ = [
    "AblationRow",
    "AblationSpec",
    "ConfusionMatrix",
    "MetricReport",
    "ReportRow",
    "SynthConfig",
    "confusion",
    "delta_to_majority",
    "macro_metrics",
    "render_delta",
    "render_report",
    "run_ablation",
    "synth_generate",
    "table4_feature_subsets",
]
