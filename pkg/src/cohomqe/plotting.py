"""Figures for the CLI report paths.  Rendered off-screen to image files."""
from __future__ import annotations

import math
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _figure(width: float = 6.0):
    golden = (math.sqrt(5) - 1) / 2
    return plt.subplots(figsize=(width, width * golden))


def plot_gap(reports: Sequence, path) -> None:
    """Fibre-power estimate versus the join value, on a log scale."""
    ns = [r.n for r in reports]
    fig, ax = _figure()
    ax.plot(ns, [math.log10(r.hypercover_value) for r in reports], "o-", label="fibre powers")
    ax.plot(ns, [math.log10(r.join_value) for r in reports], "s-", label="join")
    ax.set_xlabel("n")
    ax.set_ylabel("log10 of the bound on b_2n")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_sweep(rows: Sequence[dict], var: str, path) -> None:
    """Bound value against the swept argument, on a log scale."""
    fig, ax = _figure()
    xs = [row[var] for row in rows]
    ys = [math.log10(math.ceil(row["value"])) for row in rows]
    ax.plot(xs, ys, "o-")
    ax.set_xlabel(var)
    ax.set_ylabel("log10 of bound")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
