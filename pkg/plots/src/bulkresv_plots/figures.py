"""Paper-style figures from bulkresv sweep CSVs.

Consumes the simulator CLI's CSV schema: per-replication rows plus ``agg``
mean rows.  A figure draws one line per group (scheme/setting by default)
through the aggregate rows, with error bars from the replication spread.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

REQUIRED_COLUMNS = (
    "experiment",
    "topology_n",
    "load",
    "scheme",
    "replication",
    "offered",
    "accepted",
    "blocked",
    "failed",
    "blocking_prob",
    "fail_prob",
    "mean_flow_time",
    "mean_intervals",
    "seed",
)

# kind -> (x column, y extractor, axis labels)
KINDS = {
    "fail-block-vs-load": ("load", lambda r: r["blocking_prob"] + r["fail_prob"], "load", "fail/block probability"),
    "blocking-vs-load": ("load", lambda r: r["blocking_prob"], "load", "blocking probability"),
    "flowtime-vs-load": ("load", lambda r: r["mean_flow_time"], "load", "mean flow time"),
    "intervals-vs-n": ("topology_n", lambda r: r["mean_intervals"], "sites per side", "mean intervals per flow"),
}

_NUMERIC = (
    "topology_n",
    "load",
    "offered",
    "accepted",
    "blocked",
    "failed",
    "blocking_prob",
    "fail_prob",
    "mean_flow_time",
    "mean_intervals",
)


class PlotError(ValueError):
    """Unusable input: wrong columns or nothing to draw."""


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    kind: str
    out_path: str
    group: str = "scheme"
    logy: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind: {self.kind}")


def load_rows(path: str) -> List[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in REQUIRED_COLUMNS if col not in header]
        if missing:
            raise PlotError(f"CSV is missing columns: {', '.join(missing)}")
        rows = []
        for raw in reader:
            row = dict(raw)
            for col in _NUMERIC:
                row[col] = float(raw[col])
            rows.append(row)
    return rows


def plot(spec: FigureSpec) -> List[str]:
    """Render the figure and return the series labels that were drawn."""
    x_col, y_of, x_label, y_label = KINDS[spec.kind]
    rows = load_rows(spec.csv_path)
    if spec.group not in REQUIRED_COLUMNS:
        raise PlotError(f"unknown grouping column: {spec.group}")
    agg = [r for r in rows if r["replication"] == "agg"]
    if not agg:
        raise PlotError("no aggregate rows in CSV")
    reps = [r for r in rows if r["replication"] != "agg"]

    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=120)
    labels = sorted({str(r[spec.group]) for r in agg})
    for label in labels:
        series = sorted(
            (r for r in agg if str(r[spec.group]) == label), key=lambda r: r[x_col]
        )
        xs = [r[x_col] for r in series]
        ys = [y_of(r) for r in series]
        errs = []
        for r in series:
            cell = [
                y_of(p)
                for p in reps
                if str(p[spec.group]) == label
                and p[x_col] == r[x_col]
                and p["scheme"] == r["scheme"]
                and p["load"] == r["load"]
                and p["topology_n"] == r["topology_n"]
            ]
            if len(cell) > 1:
                mean = sum(cell) / len(cell)
                errs.append(math.sqrt(sum((v - mean) ** 2 for v in cell) / (len(cell) - 1)))
            else:
                errs.append(0.0)
        ax.errorbar(xs, ys, yerr=errs, marker="o", markersize=3.5, capsize=2, label=label)
    if spec.logy:
        ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out_path)
    plt.close(fig)
    return labels
