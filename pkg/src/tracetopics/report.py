"""Figure rendering for pipeline reports.

Renders the class-topic heat map and the lambda-cut cluster view to PNG
files next to the delimited exports. PNG metadata omits the creation
date so reruns write identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import ClassTopicMatrix, ClusterPartition, heatmap_grid

_SAVE_OPTS = {"dpi": 150, "metadata": {"Date": None}}


def render_heatmap(
    ctm: ClassTopicMatrix, path: str | Path, per_row: bool = False
) -> Path:
    """Darker cell = higher normalized topic weight."""
    path = Path(path)
    n_rows = len(ctm.class_names)
    n_cols = len(ctm.topic_ids)
    shades = np.zeros((n_rows, n_cols))
    row_of = {name: i for i, name in enumerate(ctm.class_names)}
    for name, k, _, shade in heatmap_grid(ctm, per_row):
        shades[row_of[name], k] = shade

    fig, ax = plt.subplots(
        figsize=(1.2 + 0.6 * n_cols, 1.0 + 0.4 * n_rows)
    )
    ax.imshow(shades, cmap="Greys", vmin=0.0, vmax=1.0, aspect="auto")
    ax.set_xticks(range(n_cols))
    ax.set_xticklabels([f"topic {k}" for k in ctm.topic_ids], fontsize=8)
    ax.set_yticks(range(n_rows))
    ax.set_yticklabels(ctm.class_names, fontsize=8)
    ax.set_xlabel("topic")
    ax.set_title(
        "class-topic weights"
        + (" (row-normalized shades)" if per_row else " (global shades)")
    )
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


_CLUSTER_CMAP = "tab10"


def render_clusters(part: ClusterPartition, path: str | Path) -> Path:
    """One horizontal band per class, colored by cluster membership."""
    path = Path(path)
    ordered = [
        (name, ci) for ci, group in enumerate(part.clusters) for name in group
    ]
    n = len(ordered)
    cmap = plt.get_cmap(_CLUSTER_CMAP)

    fig, ax = plt.subplots(figsize=(6.0, 0.8 + 0.35 * n))
    for row, (name, ci) in enumerate(ordered):
        ax.barh(row, 1.0, color=cmap(ci % 10), edgecolor="white")
        ax.text(0.02, row, f"{name}  [cluster {ci}]", va="center", fontsize=8)
    ax.set_ylim(-0.6, n - 0.4)
    ax.invert_yaxis()
    ax.set_xticks([])
    ax.set_yticks([])
    ax.set_title(f"lambda-cut clusters at {part.cut}")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path
