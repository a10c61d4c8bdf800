"""CSV and markdown report writers."""

import os
import platform
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd

from ..models.base import PerformanceReport
from ..sanity.series import RobustnessBreakdown

PathLike = Union[str, Path]

FLOAT_FORMAT = "%.12g"

METRIC_COLUMNS = ["metric", "approach", "dataset", "classifier", "k", "value", "n_samples", "n_skipped"]
PERFORMANCE_COLUMNS = [
    "dataset", "classifier", "model_id", "tpr", "fpr", "precision", "recall", "f_measure",
    "accuracy", "n_samples",
]
RUNTIME_COLUMNS = ["approach", "dataset", "classifier", "mean_seconds", "n_samples", "total_seconds"]

# k values shown in the markdown summary when in range
SUMMARY_KS = (5, 10, 15, 20)

NON_REPRODUCIBILITY = (
    "Absolute values reported for withheld malware corpora cannot be reproduced: those "
    "datasets are not public. This run reproduces the table formats and every "
    "internal arithmetic identity (for example rob = S - D) on the configured dataset instead."
)


def write_table(rows: Sequence[Dict[str, Any]], path: PathLike, columns: Sequence[str]) -> Path:
    """Write rows as CSV with a fixed column order and float format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(list(rows), columns=list(columns))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def performance_row(dataset: str, classifier: str, model_id: str, report: PerformanceReport) -> Dict[str, Any]:
    return {"dataset": dataset, "classifier": classifier, "model_id": model_id, **report.to_dict()}


def robustness_rows(
    classifier: str,
    breakdowns: Dict[str, Dict[int, RobustnessBreakdown]],
    class_sizes: Dict[int, int],
    label_names: Sequence[str],
) -> List[Dict[str, Any]]:
    """Wide per-class table: one row per (k, class), S/D/rob columns per approach."""
    approaches = sorted(breakdowns)
    ks = sorted({k for by_k in breakdowns.values() for k in by_k})
    rows = []
    for k in ks:
        for label, name in enumerate(label_names):
            row: Dict[str, Any] = {"classifier": classifier, "k": k, "class": name, "n": class_sizes.get(label, 0)}
            for approach in approaches:
                entry = breakdowns[approach].get(k)
                cls = entry.for_label(label) if entry is not None else None
                row[f"{approach}_S"] = cls.same if cls else None
                row[f"{approach}_D"] = cls.different if cls else None
                row[f"{approach}_rob"] = cls.rob if cls else None
            rows.append(row)
    return rows


def robustness_columns(approaches: Sequence[str]) -> List[str]:
    columns = ["classifier", "k", "class", "n"]
    for approach in sorted(approaches):
        columns += [f"{approach}_S", f"{approach}_D", f"{approach}_rob"]
    return columns


def markdown_table(frame: pd.DataFrame, floatfmt: str = "{:.3f}") -> str:
    """GitHub-style markdown table."""
    header = "| " + " | ".join(str(c) for c in frame.columns) + " |"
    rule = "|" + "|".join("---" for _ in frame.columns) + "|"
    lines = [header, rule]
    for _, row in frame.iterrows():
        cells = []
        for value in row:
            if isinstance(value, float):
                cells.append("" if pd.isna(value) else floatfmt.format(value))
            else:
                cells.append(str(value))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines)


def summary_markdown(
    dataset: str,
    metrics: pd.DataFrame,
    alpha: int,
    variation: str,
    effective_k: int,
    performance: Optional[pd.DataFrame] = None,
    n_evaluated: Optional[int] = None,
    test_size: Optional[int] = None,
) -> str:
    """Human summary: one table per metric at representative k values.

    With ``n_evaluated`` and ``test_size`` the notes state how much of the
    test side the metrics cover.
    """
    lines = [f"# Explanation sanity summary: {dataset}", ""]
    if performance is not None and not performance.empty:
        lines += ["## Classifier performance", "", markdown_table(performance), ""]

    ks = [k for k in SUMMARY_KS if k in set(metrics["k"])] or sorted(set(metrics["k"]))[:4]
    for metric in ("stability", "robustness", "effectiveness", "consistency"):
        subset = metrics[(metrics["metric"] == metric) & (metrics["k"].isin(ks))]
        if subset.empty:
            continue
        table = subset.pivot_table(
            index=["classifier", "approach"], columns="k", values="value", aggfunc="first"
        ).reset_index()
        table.columns = [c if isinstance(c, str) else f"k={c}" for c in table.columns]
        lines += [f"## {metric.capitalize()}", "", markdown_table(table), ""]

    lines += ["## Notes", ""]
    if n_evaluated is not None and test_size is not None:
        if n_evaluated < test_size:
            lines.append(
                f"- Metrics cover {n_evaluated} of {test_size} test samples, a seeded subsample "
                f"capped by max_explain_samples; n_samples + n_skipped add up to {n_evaluated}."
            )
        else:
            lines.append(f"- Metrics cover all {test_size} test samples.")
    if alpha == 2:
        lines.append(
            f"- The similar-model family has only two members ({variation}); stability "
            "averages a single model pair."
        )
    lines.append(
        f"- Effective-feature weights (k={effective_k}) count the features of the shortest "
        "leading run of explanation items whose mutation already changes the prediction. "
        "This is one reading of the effective-feature definition."
    )
    lines.append(f"- {NON_REPRODUCIBILITY}")
    return "\n".join(lines) + "\n"


def host_descriptors() -> Dict[str, str]:
    """Machine description recorded with runtime measurements."""
    return {
        "platform": platform.platform(),
        "processor": platform.processor() or platform.machine(),
        "cpu_count": str(os.cpu_count()),
        "python": sys.version.split()[0],
    }


def runtime_markdown(runtime: pd.DataFrame, dataset: str) -> str:
    host = host_descriptors()
    lines = [f"# Runtime per sample: {dataset}", ""]
    lines += [f"- {name}: {value}" for name, value in host.items()]
    lines += [
        "",
        "Times are wall-clock seconds on this machine and only comparable within one run.",
        "",
        markdown_table(runtime, floatfmt="{:.4f}"),
        "",
    ]
    return "\n".join(lines)
