"""Matplotlib renderings of the score-path summaries.

Figures land next to the delimited reports. The Agg backend is forced so
rendering works headless; each function returns the written path, or None
when there is nothing to draw.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .model import AlphaBand, ConsortiumReport
from .stats import BandTally, SizeHistogram

_DPI = 150


def save_size_distribution(histogram: SizeHistogram, dest: str | Path) -> Path | None:
    """Log-log scatter of consortium size against count."""
    points = histogram.log_points()
    if not points:
        return None
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.scatter(xs, ys, s=22, color="#1f6fb4", zorder=3)
    ax.set_xlabel("log10 consortium size (articles)")
    ax.set_ylabel("log10 number of consortia")
    ax.set_title("Consortium size distribution")
    ax.grid(True, linewidth=0.4, alpha=0.5)
    fig.tight_layout()
    fig.savefig(dest, dpi=_DPI)
    plt.close(fig)
    return Path(dest)


def save_band_chart(tallies: Mapping[AlphaBand, BandTally], dest: str | Path) -> Path | None:
    """Grouped bars of consortium and paper counts per ordering band."""
    if not any(t.consortium_count or t.paper_count for t in tallies.values()):
        return None
    bands = list(AlphaBand)
    consortium_counts = [tallies[b].consortium_count for b in bands]
    paper_counts = [tallies[b].paper_count for b in bands]
    positions = range(len(bands))
    width = 0.38
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.bar([p - width / 2 for p in positions], consortium_counts, width,
           label="consortia", color="#1f6fb4")
    ax.bar([p + width / 2 for p in positions], paper_counts, width,
           label="papers", color="#e08214")
    ax.set_xticks(list(positions))
    ax.set_xticklabels([b.label for b in bands], rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("count")
    ax.set_title("Alphabetical-ordering bands")
    ax.legend()
    fig.tight_layout()
    fig.savefig(dest, dpi=_DPI)
    plt.close(fig)
    return Path(dest)


def save_mnlcs_by_year(reports: Iterable[ConsortiumReport], dest: str | Path) -> Path | None:
    """Scatter of first publication year against MNLCS, with the 1.0 baseline."""
    pairs = [
        (r.consortium.first_year, r.mnlcs) for r in reports if r.mnlcs is not None
    ]
    if not pairs:
        return None
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ax.scatter([p[0] for p in pairs], [p[1] for p in pairs], s=16,
               color="#1f6fb4", alpha=0.7, zorder=3)
    ax.axhline(1.0, color="#777777", linewidth=0.8, linestyle="--",
               label="world average")
    ax.set_xlabel("first publication year")
    ax.set_ylabel("MNLCS")
    ax.set_title("Consortium impact by first year")
    ax.legend()
    fig.tight_layout()
    fig.savefig(dest, dpi=_DPI)
    plt.close(fig)
    return Path(dest)
