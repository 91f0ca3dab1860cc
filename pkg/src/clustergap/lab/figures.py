"""PNG figures written next to the CSV outputs."""
from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def figure_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".png")


def plot_sweep(records, path: str | Path) -> Path:
    """Mean err against delta_bar_sq, one line per (algorithm, n, p, K)."""
    groups = defaultdict(lambda: defaultdict(list))
    for r in records:
        if r.err is None:
            continue
        groups[(r.algorithm, r.n, r.p, r.K)][r.delta_bar_sq].append(r.err)
    fig, ax = plt.subplots(figsize=(6, 4))
    for (alg, n, p, K), by_delta in sorted(groups.items()):
        xs = sorted(by_delta)
        ys = [float(np.mean(by_delta[x])) for x in xs]
        ax.plot(xs, ys, marker="o", label=f"{alg} n={n} p={p} K={K}")
    ax.set_xlabel("delta_bar_sq")
    ax.set_ylabel("mean err")
    ax.set_ylim(-0.02, 1.02)
    if groups:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return Path(path)


def plot_recovery(points, path: str | Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([p.delta_bar_sq for p in points], [p.exact_recovery_rate for p in points], marker="o")
    ax.set_xlabel("delta_bar_sq")
    ax.set_ylabel("exact recovery rate")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return Path(path)
