"""Figures written next to the delimited CLI output."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .sim import SimulationResult  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.frameon": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}

cm = 1 / 2.54


def plot_capacity_sweep(rows: Sequence[dict], path: str | Path, title: str | None = None) -> Path:
    """Optimal value and loss ratio against the common lower bound."""
    feasible = [r for r in rows if r["status"] == "ok"]
    eps = np.array([r["epsilon"] for r in feasible])
    with plt.rc_context(STYLE):
        fig, (ax_val, ax_ratio) = plt.subplots(1, 2, figsize=(16 * cm, 6 * cm))
        ax_val.plot(eps, [r["h_opt"] for r in feasible], "o-", ms=3, lw=1)
        ax_val.set_xlabel(r"common lower bound $\epsilon$")
        ax_val.set_ylabel("optimal value")
        ax_ratio.plot(eps, [r["ratio"] for r in feasible], "s-", ms=3, lw=1, color="C3")
        ax_ratio.set_xlabel(r"common lower bound $\epsilon$")
        ax_ratio.set_ylabel("unconstrained / constrained")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def plot_simulation(result: SimulationResult, path: str | Path) -> Path:
    """Empirical vs analytic mean payment per rank, with 3-sigma bars."""
    m = len(result.spikes)
    ranks = np.arange(1, m + 1)
    width = 0.38
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(8, 2 * m) * cm, 6 * cm))
        ax.bar(ranks - width / 2, result.expected_payments, width, label="expected $h_j$", color="0.6")
        ax.bar(
            ranks + width / 2,
            result.empirical_payment_means,
            width,
            yerr=3 * np.array(result.payment_standard_errors),
            capsize=2,
            label=f"empirical ({result.scheme.value}, n={result.trials})",
            color="C0",
        )
        ax.set_xticks(ranks)
        ax.set_xlabel("rank")
        ax.set_ylabel("mean payment")
        ax.legend(loc="upper right")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)
