"""Figure rendering for campaign reports.

All functions take already-computed data and a target path; nothing
here recomputes statistics.  The Agg backend is forced so report
generation works in headless environments.
"""

import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .kernel import predicted_pair_correlation

STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "axes.titlesize": 11,
    "legend.fontsize": 9,
    "savefig.bbox": "tight",
}


def _styled_figure():
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
    ax.grid(True, alpha=0.3)
    return fig, ax


def plot_density_trend(rows, theory: float, path) -> None:
    """Rescaled density estimates per N against the kernel prediction.

    rows: iterable of (N, density_hat) pairs.
    """
    rows = sorted(rows)
    fig, ax = _styled_figure()
    ns = [r[0] for r in rows]
    vals = [r[1] for r in rows]
    ax.plot(ns, vals, "o-", label="empirical")
    ax.axhline(theory, color="k", linestyle="--", linewidth=1,
               label=f"limit {theory:.4f}")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("matrix size N")
    ax.set_ylabel("rescaled density")
    ax.set_title("Local density vs matrix size")
    ax.legend()
    fig.savefig(path)
    plt.close(fig)


def plot_pair_correlation(bin_centers, values, counts, path, N=None) -> None:
    """Empirical pair correlation with the kernel curve overlaid."""
    fig, ax = _styled_figure()
    centers = np.asarray(bin_centers, dtype=float)
    ax.plot(centers, np.asarray(values, dtype=float), "o",
            markersize=4, label="empirical")
    grid = np.linspace(0.0, centers[-1] * 1.02, 300)
    ax.plot(grid, predicted_pair_correlation(grid), "-", linewidth=1.2,
            label="1 - exp(-r^2)")
    ax.set_xlabel("rescaled separation r")
    ax.set_ylabel("g(r)")
    title = "Pair correlation"
    if N is not None:
        title += f" (N = {N})"
    ax.set_title(title)
    ax.set_ylim(0.0, max(1.3, float(np.max(values)) * 1.1))
    ax.legend()
    fig.savefig(path)
    plt.close(fig)


def plot_spacing_ecdfs(run_values, run_cdf, base_values, base_cdf,
                       path, N=None, ks=None) -> None:
    """Run and baseline nearest-neighbour spacing ECDFs."""
    fig, ax = _styled_figure()
    ax.step(run_values, run_cdf, where="post", label="campaign")
    ax.step(base_values, base_cdf, where="post", linestyle="--",
            label="undeformed baseline")
    ax.set_xlabel("rescaled nearest-neighbour spacing")
    ax.set_ylabel("ECDF")
    title = "Spacing distribution"
    if N is not None:
        title += f" (N = {N})"
    if ks is not None:
        title += f", KS = {ks:.3f}"
    ax.set_title(title)
    ax.legend(loc="lower right")
    fig.savefig(path)
    plt.close(fig)


def plot_boundary(polylines, atoms, path, z0=None) -> None:
    """Support boundary polylines with atom markers."""
    fig, ax = _styled_figure()
    for line in polylines:
        ax.plot(line.real, line.imag, "-", color="C0", linewidth=1.2)
    if atoms:
        pts = np.asarray(atoms, dtype=complex)
        ax.plot(pts.real, pts.imag, "x", color="C3", markersize=8,
                label="atoms")
    if z0 is not None:
        ax.plot([complex(z0).real], [complex(z0).imag], "o", color="C2",
                markersize=6, label="z0")
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title("Limit support boundary")
    if atoms or z0 is not None:
        ax.legend()
    fig.savefig(path)
    plt.close(fig)
