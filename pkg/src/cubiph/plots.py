"""Figure rendering for CLI reports.

matplotlib is imported lazily and only here, so the computational core has
no plotting dependency; figures are written next to the CSV tables they
illustrate.
"""

from __future__ import annotations

import os


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_stats_figures(stats, outdir) -> list[str]:
    """Histogram of bar counts, PH class balance, and crosstab averages."""
    plt = _plt()
    paths = []

    fig, ax = plt.subplots(figsize=(6, 4))
    ks = list(stats.bar_count_histogram.keys())
    vs = list(stats.bar_count_histogram.values())
    ax.bar(ks, vs, width=0.8, color="#4878cf")
    ax.set_xlabel("bars in barcode")
    ax.set_ylabel("images")
    ax.set_title("Number of bars per image")
    p = os.path.join(outdir, "stats_histogram.png")
    fig.savefig(p, dpi=120, bbox_inches="tight")
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(4, 4))
    ax.bar(["class 0", "class 1"], stats.ph_class_counts, color=["#4878cf", "#ee854a"])
    ax.set_ylabel("images")
    ax.set_title(f"PH classes at theta={stats.theta:g} ({stats.mode})")
    p = os.path.join(outdir, "stats_ph_classes.png")
    fig.savefig(p, dpi=120, bbox_inches="tight")
    plt.close(fig)
    paths.append(p)

    import numpy as np

    for name, grid, ylabel in (
        ("stats_crosstab_bars.png", stats.crosstab_avg_bars, "avg bars"),
        ("stats_crosstab_len.png", stats.crosstab_avg_len, "avg bar length"),
    ):
        fig, ax = plt.subplots(figsize=(7, 4))
        x = np.arange(grid.shape[0])
        ax.bar(x - 0.2, grid[:, 0], width=0.4, label="PH class 0", color="#4878cf")
        ax.bar(x + 0.2, grid[:, 1], width=0.4, label="PH class 1", color="#ee854a")
        ax.set_xticks(x)
        ax.set_xlabel("image class")
        ax.set_ylabel(ylabel)
        ax.legend()
        p = os.path.join(outdir, name)
        fig.savefig(p, dpi=120, bbox_inches="tight")
        plt.close(fig)
        paths.append(p)
    return paths


def render_pi_figure(pi, path) -> str:
    """Heat map of a persistence image in (birth, persistence) coordinates."""
    plt = _plt()
    p = pi.params
    fig, ax = plt.subplots(figsize=(4.5, 4))
    extent = (*p.birth_range, *p.pers_range)
    im = ax.imshow(pi.values.T, origin="lower", extent=extent, aspect="auto", cmap="viridis")
    ax.set_xlabel("birth")
    ax.set_ylabel("persistence")
    fig.colorbar(im, ax=ax)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return str(path)


def render_bench_figure(stage_means: dict[str, float], path) -> str:
    """Bar chart of mean per-image wall time by pipeline stage."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.5, 4))
    names = list(stage_means.keys())
    ax.barh(names, [stage_means[k] * 1e3 for k in names], color="#4878cf")
    ax.set_xlabel("mean per image (ms)")
    ax.invert_yaxis()
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return str(path)
