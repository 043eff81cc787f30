"""Report figures written next to the CSV outputs.

Figures are built on bare :class:`matplotlib.figure.Figure` objects so that
no pyplot state or interactive backend is involved.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .keypoints import COCO_PARTS

DPI = 150


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    return path


def plot_confusion_matrix(cm, path, title: str | None = None) -> Path:
    counts = np.asarray(cm.counts)
    fig = Figure(figsize=(1.2 + 0.7 * len(cm.columns), 1.0 + 0.6 * len(cm.labels)))
    ax = fig.add_subplot()
    im = ax.imshow(counts, cmap="Blues", vmin=0)
    ax.set_xticks(range(len(cm.columns)), cm.columns, rotation=45, ha="right")
    ax.set_yticks(range(len(cm.labels)), cm.labels)
    ax.set_xlabel("predicted")
    ax.set_ylabel("actual")
    hi = counts.max() if counts.size else 0
    for (r, c), v in np.ndenumerate(counts):
        ax.text(c, r, str(v), ha="center", va="center",
                color="white" if hi and v > hi / 2 else "black", fontsize=8)
    ax.set_title(title or f"accuracy {cm.accuracy:.1%} ({cm.correct}/{cm.total})")
    fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
    return _save(fig, path)


def plot_sweep(report, path) -> Path:
    rows = np.array([r[:2] for r in report.rows], dtype=float)
    order = np.argsort(rows[:, 0], kind="stable")
    fig = Figure(figsize=(4.5, 3.2))
    ax = fig.add_subplot()
    ax.plot(rows[order, 0], 100 * rows[order, 1], "o-")
    ax.set_xlabel("variance threshold")
    ax.set_ylabel("correctly classified [%]")
    ax.set_ylim(0, 105)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_bench(rows, path) -> Path:
    """Runtime against series length, one line per method/radius."""
    fig = Figure(figsize=(4.5, 3.2))
    ax = fig.add_subplot()
    series = {}
    for r in rows:
        key = r["method"] if r["method"] == "exact" else f"fast r={r['radius']}"
        series.setdefault(key, []).append((r["length"], r["mean_seconds"]))
    for key, pts in sorted(series.items()):
        pts.sort()
        ax.loglog(*zip(*pts), "o-", label=key)
    ax.set_xlabel("series length")
    ax.set_ylabel("mean runtime [s]")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, which="both")
    return _save(fig, path)


def plot_signals(prepared, path, t_var: float | None = None) -> Path:
    """All 36 coordinate signals; salient ones drawn in colour and labelled."""
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot()
    salient = prepared.salient(t_var) if t_var is not None else frozenset()
    for d, row in enumerate(prepared.smoothed):
        if d in salient:
            ax.plot(row, lw=1.5, label=f"{COCO_PARTS[d // 2]} {'xy'[d % 2]}")
        else:
            ax.plot(row, lw=0.6, color="0.7")
    ax.set_xlabel("frame")
    ax.set_ylabel("normalized coordinate (zero-mean)")
    if salient:
        ax.legend(fontsize=7, ncol=2)
    ax.set_title(prepared.source_id)
    return _save(fig, path)
