"""Figure rendering for reports; written next to the delimited outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .heavytail import FitResult, TailSample, ccdf, model_ccdf
from .metrics import GraphSummary
from .regress import PredictionBand

DPI = 150


def plot_ccdf_fits(
    sample: TailSample, fits: list[FitResult], title: str, path
) -> None:
    """Log-log empirical CCDF with the fitted tail models overlaid."""
    vals, emp = ccdf(sample)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(vals, emp, "o", ms=3, mfc="none", color="0.3", label="data")
    for fit in fits:
        tail_mask = vals >= fit.x_min
        xs = vals[tail_mask]
        if len(xs) < 2:
            continue
        scale = emp[tail_mask][0]  # anchor the model at the tail start
        ys = model_ccdf(fit, xs) * scale
        label = fit.family.replace("_", " ")
        if "gamma" in fit.params:
            label += f" ($\\gamma$={fit.params['gamma']:.2f})"
        ax.loglog(xs, ys, lw=1.5, label=label)
    ax.set_xlabel(title)
    ax.set_ylabel("CCDF")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_sweep(rows: list[GraphSummary], path) -> None:
    """Six panels of subgraph properties against the activity threshold."""
    t = [r.threshold for r in rows]
    fig, axes = plt.subplots(2, 3, figsize=(12, 7))

    ax = axes[0, 0]
    ax.plot(t, [r.n for r in rows], "o-", label="nodes")
    ax.plot(t, [r.m_directed for r in rows], "s-", label="links")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax.set_ylabel("count")

    ax = axes[0, 1]
    ax.plot(t, [r.n_components for r in rows], "o-", label="components")
    ax.plot(t, [r.n_isolates for r in rows], "s-", label="isolates")
    ax.legend(fontsize=8)

    ax = axes[0, 2]
    ax.plot(t, [r.density_directed for r in rows], "o-")
    ax.set_ylabel("density (directed)")

    ax = axes[1, 0]
    ax.plot(t, [r.avg_clustering for r in rows], "o-", label="avg clustering")
    ax.plot(t, [r.transitivity for r in rows], "s-", label="transitivity")
    ax.legend(fontsize=8)

    ax = axes[1, 1]
    ax.plot(t, [r.assortativity for r in rows], "o-")
    ax.axhline(0.0, color="0.8", lw=0.8)
    ax.set_ylabel("assortativity")

    ax = axes[1, 2]
    ax.plot(t, [r.radius for r in rows], "o-", label="radius")
    ax.plot(t, [r.diameter for r in rows], "s-", label="diameter")
    ax.legend(fontsize=8)

    for ax in axes.flat:
        ax.set_xlabel("activity threshold")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_band(
    x: np.ndarray,
    y: np.ndarray,
    band: PredictionBand,
    xlabel: str,
    ylabel: str,
    path,
    logy: bool = False,
) -> None:
    """Scatter plus fitted mean curve and its shaded 95% band."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(x, y, ".", ms=2, color="0.6", alpha=0.4, rasterized=True)
    ax.plot(band.x, band.mean, color="C3", lw=1.8)
    ax.fill_between(band.x, band.lo, band.hi, color="C3", alpha=0.25, lw=0)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
