"""Rendering of metric tables as CSV or markdown.

Metrics are stored as fractions and only turned into percentages here,
rounded to two decimals.  The delta column is the macro-F1 gain over the
majority baseline in percentage points, signed except for an exact zero;
rows without a meaningful delta (the baseline itself) leave it empty.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from effsense.evaluation.metrics import MetricReport, render_delta

REPORT_CSV_HEADER = (
    "group,features,head,precision_macro,recall_macro,f1_macro,delta_f1_ppt"
)


@dataclass(frozen=True)
class ReportRow:
    group: str
    features: str
    head: str
    report: MetricReport
    delta_ppt: float | None = None


def _pct(value: float) -> str:
    return f"{value * 100:.2f}"


def render_report(rows: Sequence[ReportRow], fmt: str = "csv") -> str:
    """Render rows as ``csv`` or ``markdown``; both end with a newline."""
    if fmt == "csv":
        lines = [REPORT_CSV_HEADER]
        for row in rows:
            delta = "" if row.delta_ppt is None else render_delta(row.delta_ppt)
            lines.append(
                f"{row.group},{row.features},{row.head},"
                f"{_pct(row.report.macro_precision)},{_pct(row.report.macro_recall)},"
                f"{_pct(row.report.macro_f1)},{delta}"
            )
        return "".join(f"{line}\n" for line in lines)
    if fmt == "markdown":
        lines = [
            "| Group | Features | Head | Precision | Recall | F1 | Delta F1 (ppt) |",
            "| --- | --- | --- | --- | --- | --- | --- |",
        ]
        for row in rows:
            delta = "" if row.delta_ppt is None else render_delta(row.delta_ppt)
            lines.append(
                f"| {row.group} | {row.features} | {row.head} | "
                f"{_pct(row.report.macro_precision)} | {_pct(row.report.macro_recall)} | "
                f"{_pct(row.report.macro_f1)} | {delta} |"
            )
        return "".join(f"{line}\n" for line in lines)
    raise ValueError(f"unknown report format {fmt!r}")
