"""Figure rendering for the report paths (written next to the CSV/JSON)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .decomposition import Decomposition  # noqa: E402
from .harness import PrefixCheckReport, RunRecord  # noqa: E402


def save_run_figure(
    records: Sequence[RunRecord], path: Union[str, Path], title: str = ""
) -> None:
    """Max-discrepancy and potential traces, one line per seed."""
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 5.0))
    for rec in records:
        steps = [r.step for r in rec.rows]
        ax1.plot(steps, [r.max_disc for r in rec.rows], lw=0.9,
                 label=f"seed {rec.seed}")
        ax2.plot(steps, [r.potential for r in rec.rows], lw=0.9)
    ax1.set_ylabel("max |discrepancy|")
    ax2.set_ylabel("potential")
    ax2.set_xlabel("step")
    ax2.set_yscale("log")
    if title:
        ax1.set_title(title)
    if 0 < len(records) <= 8:
        ax1.legend(fontsize=8, frameon=False)
    for ax in (ax1, ax2):
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_margin_figure(report: PrefixCheckReport, path: Union[str, Path]) -> None:
    """Per-k inequality margins for both signs."""
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for sign, marker in (("-1", "o"), ("+1", "s")):
        pts = [(m.k, m.margin) for m in report.margins if m.sign == sign]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker, ms=3.5,
                ls="-", lw=0.7, label=f"sign {sign}")
    ax.axhline(0.0, color="0.4", lw=0.8)
    ax.set_xlabel("prefix size k")
    ax.set_ylabel("margin (lhs - rhs)")
    ax.legend(fontsize=8, frameon=False)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_membership_figure(dec: Decomposition, path: Union[str, Path]) -> None:
    """Histogram of how many parts each vertex belongs to."""
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    counts = dec.membership
    top = max(counts) if counts else 0
    bins = [c + 0.5 for c in range(-1, top + 1)]
    ax.hist(counts, bins=bins, color="C0", rwidth=0.9)
    ax.set_xlabel("parts containing the vertex")
    ax.set_ylabel("vertices")
    ax.set_title(f"{len(dec.parts)} parts, {dec.rounds} round(s)")
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
