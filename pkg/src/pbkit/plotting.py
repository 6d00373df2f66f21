"""Figures for the ``outcome`` and ``info`` reports.

Rendering uses the non-interactive Agg backend and writes straight to a file;
the format follows the file suffix (``.png``, ``.pdf``, ``.svg``).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Patch  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}

FUNDED = "#2b8a3e"
UNAFFORDABLE = "#c92a2a"
NOT_CONSIDERED = "#adb5bd"


def _size(n_bars: int):
    return (max(4.0, 0.35 * n_bars + 1.5), 3.2)


def plot_outcome(outcome, instance, path) -> None:
    """Bar chart of total scores in ranking order, coloured by what greedy did
    with each project, with a second panel of the running budget."""
    colours = {"funded": FUNDED, "unaffordable": UNAFFORDABLE, "not considered": NOT_CONSIDERED}
    ids = [step[0] for step in outcome.steps]
    scores = [float(step[1]) for step in outcome.steps]
    actions = [step[4] for step in outcome.steps]
    remaining_after = []
    for pid, _, cost, before, action in outcome.steps:
        remaining_after.append(float(before - cost if action == "funded" else before))

    with plt.rc_context(STYLE):
        fig, (ax, ax2) = plt.subplots(2, 1, figsize=(_size(len(ids))[0], 5.0), sharex=True)
        x = range(len(ids))
        ax.bar(x, scores, color=[colours[a] for a in actions])
        ax.set_ylabel("total score")
        ax.set_title(f"{instance.meta.unit} {instance.meta.instance}: greedy ({outcome.variant})")
        handles = [Patch(color=c, label=a) for a, c in colours.items() if a in actions]
        ax.legend(handles=handles, frameon=False)

        # budget left after each step, starting from the full budget
        xs = [-0.5] + [i + 0.5 for i in x]
        ax2.step(xs, [float(outcome.budget)] + remaining_after, where="pre", color="black")
        ax2.axhline(0, color=NOT_CONSIDERED, lw=0.8)
        ax2.set_ylabel("budget left")
        ax2.set_xticks(list(x))
        ax2.set_xticklabels(ids, rotation=90 if len(ids) > 12 else 0)
        ax2.set_xlabel("project (ranking order)")
        fig.savefig(path)
        plt.close(fig)


def plot_summary(instance, path) -> None:
    """Project cost distribution and vote length histogram side by side."""
    costs = sorted(float(p.cost) for p in instance.projects)
    lengths = [len(v.vote) for v in instance.votes]
    with plt.rc_context(STYLE):
        fig, (ax, ax2) = plt.subplots(1, 2, figsize=(7.5, 3.0))
        ax.hist(costs, bins=min(20, max(1, len(costs))), color="#495057")
        ax.axvline(float(instance.meta.budget), color=UNAFFORDABLE, lw=1, label="budget")
        ax.set_xlabel("project cost")
        ax.set_ylabel("projects")
        ax.legend(frameon=False)
        if lengths:
            bins = range(min(lengths), max(lengths) + 2)
            ax2.hist(lengths, bins=bins, align="left", rwidth=0.8, color="#1c7ed6")
        ax2.set_xlabel("projects per vote")
        ax2.set_ylabel("votes")
        fig.suptitle(f"{instance.meta.unit} {instance.meta.instance} ({instance.meta.vote_type})")
        fig.savefig(path)
        plt.close(fig)
