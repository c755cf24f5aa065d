"""Novelty-versus-position figures rendered to files.

Produces the plots the trace CSVs are made for: one panel per trial,
novelty against arc position, with door stretches shaded.  Uses the Agg
backend so it works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import TrialTrace

__all__ = ["save_trace_figure", "save_run_figure"]


def _draw(ax, trace: TrialTrace, intervals=None, y_max=1.05):
    arcs = [r.arc_position for r in trace.records]
    nov = [r.novelty for r in trace.records]
    if intervals:
        for lo, hi in intervals:
            ax.axvspan(lo, hi, color="0.9", zorder=0)
    ax.plot(arcs, nov, lw=1.0, color="tab:blue")
    ax.set_ylim(0.0, y_max)
    if arcs:
        ax.set_xlim(arcs[0], arcs[-1])
    ax.set_title(trace.label, fontsize=9)
    ax.grid(True, alpha=0.25)


def save_trace_figure(trace: TrialTrace, path, intervals=None, title=None) -> Path:
    """Render one trial to a PNG; shades the given arc intervals."""
    fig, ax = plt.subplots(figsize=(6.0, 2.2))
    _draw(ax, trace, intervals)
    ax.set_xlabel("position along route (m)")
    ax.set_ylabel("novelty")
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_run_figure(traces: list[TrialTrace], path, intervals=None,
                    title=None, ncols: int = 2) -> Path:
    """Render a whole run as a grid of per-trial panels."""
    n = max(len(traces), 1)
    ncols = min(ncols, n)
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(5.5 * ncols, 1.8 * nrows),
                             squeeze=False, sharex=True, sharey=True)
    for i, trace in enumerate(traces):
        _draw(axes[i // ncols][i % ncols], trace, intervals)
    for j in range(len(traces), nrows * ncols):
        axes[j // ncols][j % ncols].axis("off")
    for ax in axes[-1]:
        ax.set_xlabel("position along route (m)")
    for row in axes:
        row[0].set_ylabel("novelty")
    if title:
        fig.suptitle(title, fontsize=11)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
