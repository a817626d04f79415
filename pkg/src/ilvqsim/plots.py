"""Figure rendering for the CLI report paths.

Every report command writes its delimited table and drops a rendered
figure next to it.  Figures are plain matplotlib PNGs with fixed
metadata so repeated runs produce identical files.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = [
    "render_sweep",
    "render_bench",
    "render_run",
    "render_epidemic",
]

# Strip the matplotlib version stamp so output bytes depend only on data.
_PNG_METADATA = {"Software": "ilvqsim"}


def _save(fig, path) -> None:
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def render_sweep(rows: Sequence, path) -> None:
    """Tagged-node F-score (with CI) and message count against sharing probability."""
    ts = [row.t for row in rows]
    f1s = [row.f1_mean for row in rows]
    cis = [row.f1_ci for row in rows]
    ls = [row.l_mean for row in rows]
    fig, (ax_f1, ax_l) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_f1.errorbar(ts, f1s, yerr=cis, marker="o", capsize=3)
    ax_f1.set_xlabel("sharing probability t")
    ax_f1.set_ylabel("tagged-node F1")
    ax_f1.set_ylim(0.0, 1.05)
    ax_f1.grid(True, alpha=0.3)
    ax_l.plot(ts, ls, marker="s", color="tab:red")
    ax_l.set_xlabel("sharing probability t")
    ax_l.set_ylabel("messages L")
    ax_l.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_bench(feature_rows: Sequence, class_rows: Sequence, path) -> None:
    """Prototype memory and wall time along the feature and class axes."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 6))
    for column, (rows_axis, x_values, x_label) in enumerate(
        [
            (feature_rows, [r.n_features for r in feature_rows], "features"),
            (class_rows, [r.n_classes for r in class_rows], "classes"),
        ]
    ):
        axes[0][column].plot(x_values, [r.bytes for r in rows_axis], marker="o")
        axes[0][column].set_xlabel(x_label)
        axes[0][column].set_ylabel("prototype bytes")
        axes[0][column].grid(True, alpha=0.3)
        axes[1][column].plot(
            x_values, [r.wall_ms for r in rows_axis], marker="s", color="tab:red"
        )
        axes[1][column].set_xlabel(x_label)
        axes[1][column].set_ylabel("wall time (ms)")
        axes[1][column].grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_run(result, path) -> None:
    """Windowed F-score and prototype count per node over local steps."""
    fig, (ax_f1, ax_m) = plt.subplots(1, 2, figsize=(9, 3.5))
    for node in result.nodes:
        tag = " (tagged)" if node.node_id == result.tagged_node else ""
        ax_f1.plot(node.f1_windowed, label=f"node {node.node_id}{tag}")
        ax_m.plot(node.prototype_counts, label=f"node {node.node_id}{tag}")
    ax_f1.set_xlabel("local step")
    ax_f1.set_ylabel("windowed F1")
    ax_f1.set_ylim(0.0, 1.05)
    ax_f1.grid(True, alpha=0.3)
    ax_f1.legend(fontsize=7)
    ax_m.set_xlabel("local step")
    ax_m.set_ylabel("prototype count")
    ax_m.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_epidemic(grid: Sequence[tuple[float, float, float]], path) -> None:
    """Closed-form informed fraction against its numerical integration."""
    ts = [row[0] for row in grid]
    closed = [row[1] for row in grid]
    numeric = [row[2] for row in grid]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(ts, closed, label="closed form")
    ax.plot(ts, numeric, linestyle="--", label="RK4")
    ax.set_xlabel("time")
    ax.set_ylabel("informed fraction")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
