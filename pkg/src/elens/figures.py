"""Matplotlib renderings written next to report files.

Two figures accompany a generated report: a lifecycle coverage heatmap
(questions per principle and stage) and a goal-satisfaction chart colored
by the mitigation threshold.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .checklist import coverage_report
from .errors import ElensError
from .goals import bound_leaf_overrides
from .vocab import LIFECYCLE_STAGES

if TYPE_CHECKING:
    from .model import AssuranceCase


def render_coverage_heatmap(case: "AssuranceCase", path: str | Path) -> Path:
    """Question counts per principle and lifecycle stage; zero cells are
    coverage gaps."""
    coverage = coverage_report(case)
    principles = list(case.principles)
    grid = [
        [coverage.cells[pid][stage].question_count for stage in LIFECYCLE_STAGES]
        for pid in principles
    ]
    fig, ax = plt.subplots(figsize=(9, 1.2 + 0.6 * max(len(principles), 1)))
    if principles:
        image = ax.imshow(grid, cmap="Greens", aspect="auto", vmin=0)
        fig.colorbar(image, ax=ax, label="questions")
        for i, pid in enumerate(principles):
            for j, stage in enumerate(LIFECYCLE_STAGES):
                count = grid[i][j]
                color = "firebrick" if count == 0 else "black"
                ax.text(j, i, str(count), ha="center", va="center", color=color)
        ax.set_yticks(range(len(principles)), principles)
    else:
        ax.text(0.5, 0.5, "no principles declared", ha="center", va="center")
    ax.set_xticks(range(len(LIFECYCLE_STAGES)), LIFECYCLE_STAGES, rotation=30, ha="right")
    ax.set_title(f"Checklist coverage: {case.id}")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_goal_chart(case: "AssuranceCase", path: str | Path, threshold: int = 100) -> Path:
    """Horizontal bars of propagated node satisfaction; mitigation nodes
    below threshold show red."""
    graph = case.goal_graph
    fig, ax = plt.subplots(figsize=(8, 1.5 + 0.35 * max(len(graph.nodes), 1)))
    try:
        values = graph.propagate(overrides=bound_leaf_overrides(case)) if graph.nodes else {}
    except ElensError as exc:
        values = {}
        ax.text(0.5, 0.5, f"goal graph not evaluable: {exc.code}", ha="center", va="center")
    if values:
        node_ids = sorted(values, reverse=True)
        sats = [values[n] for n in node_ids]
        colors = [
            "firebrick"
            if case.goal_graph.nodes[n].mitigates and values[n] < threshold
            else "seagreen"
            for n in node_ids
        ]
        ax.barh(node_ids, sats, color=colors)
        ax.axvline(threshold, color="gray", linestyle="--", linewidth=1, label=f"threshold {threshold}")
        ax.set_xlim(-100, 105)
        ax.legend(loc="lower right")
    elif not graph.nodes:
        ax.text(0.5, 0.5, "no goal graph", ha="center", va="center")
    ax.set_xlabel("satisfaction")
    ax.set_title(f"Goal satisfaction: {case.id}")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
