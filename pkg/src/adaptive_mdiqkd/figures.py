"""Matplotlib rendering of sweep and deficit tables to image files.

Presentation only: the CSV written next to each figure is the canonical
output. Uses the Agg backend so rendering works headless.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .keyrate import RateReport  # noqa: E402

__all__ = ["save_deficit_figure", "save_sweep_figure"]


def save_sweep_figure(reports: Sequence[RateReport], crossover_km: float | None, path: str | Path) -> None:
    """Secret key rate per pulse vs distance, adaptive solid and baseline dashed."""
    distances = [r.L for r in reports]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, values, style in (
        ("adaptive pairing", [r.G_adaptive for r in reports], "-"),
        ("predetermined pairing", [r.G_original for r in reports], "--"),
    ):
        xs = [L for L, g in zip(distances, values) if g > 0.0]
        ys = [g for g in values if g > 0.0]
        ax.semilogy(xs, ys, style, label=label)
    if crossover_km is not None and distances and min(distances) <= crossover_km <= max(distances):
        ax.axvline(crossover_km, color="gray", linestyle=":", linewidth=1.0)
        ax.annotate(
            f"crossover {crossover_km:.1f} km",
            xy=(crossover_km, ax.get_ylim()[0]),
            xytext=(4, 12),
            textcoords="offset points",
            fontsize=8,
            color="gray",
        )
    ax.set_xlabel("distance L (km)")
    ax.set_ylabel("secret key rate G per pulse")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_deficit_figure(rows: Sequence[dict], path: str | Path) -> None:
    """Exact pairing deficit vs multiplexing size, one curve per heralding probability."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    by_p: dict[float, list[dict]] = {}
    for row in rows:
        by_p.setdefault(row["p"], []).append(row)
    for p, group in sorted(by_p.items()):
        group = sorted(group, key=lambda r: r["m"])
        ms = [r["m"] for r in group]
        ax.loglog(ms, [r["g_exact"] for r in group], "o-", label=f"p = {p:g}")
        ax.loglog(ms, [r["g_approx"] for r in group], ":", color="gray", linewidth=0.8)
    ax.set_xlabel("multiplexing size m")
    ax.set_ylabel("pairing deficit")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
