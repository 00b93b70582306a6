"""Matplotlib figures written next to the delimited report outputs."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from guilget.metrics import EvalReport

_METRIC_FIELDS = ("cpi", "ccs", "alignment", "w_bbox", "gui_agc")
_METRIC_LABELS = ("CPI", "CCS", "Alignment", "W bbox", "GUI-AGC")


def save_loss_curves(history: Sequence[dict[str, float]], path: str | Path) -> None:
    """Per-step loss components on a log-x grid."""
    steps = [row["step"] for row in history]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for key in ("total", "pred", "box", "kl", "rel", "reg", "cc", "cp"):
        ax.plot(steps, [row[key] for row in history], label=key, linewidth=1.0)
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.legend(ncol=4, fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_metric_bars(reports: Sequence[EvalReport], path: str | Path) -> None:
    """Grouped bar chart of the five metrics, one group per report row."""
    groups = [r.group or "all" for r in reports]
    x = range(len(groups))
    width = 0.16
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(groups) + 2), 4.5))
    for i, (field, label) in enumerate(zip(_METRIC_FIELDS, _METRIC_LABELS)):
        offsets = [xi + (i - 2) * width for xi in x]
        ax.bar(offsets, [getattr(r, field) for r in reports], width=width, label=label)
    ax.set_xticks(list(x))
    ax.set_xticklabels(groups, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.legend(fontsize=8, ncol=5)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
