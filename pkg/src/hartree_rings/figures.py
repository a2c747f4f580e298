"""Figure rendering for the CLI report paths (written next to the CSV/JSON)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "ground_state_figure",
    "ring_kernel_figure",
    "landscape_figure",
    "residual_scaling_figure",
    "expansion_figure",
]


def ground_state_figure(profile, stats, report, path) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    r = profile.grid.nodes()
    ax1.semilogy(r, np.maximum(profile.values, 1e-300), lw=1.2)
    ax1.set_xlabel("r")
    ax1.set_ylabel("w(r)")
    ax1.set_title(f"ground state  (M={stats.M_w:.4f}, K={stats.K_w:.4f})")
    sel = (r >= report.window[0]) & (r <= report.window[1])
    rr = r[sel]
    ax2.plot(rr, profile.values[sel] * rr * np.exp(rr), label="w·r·e^r")
    ax2.plot(rr, profile.values[sel] * rr ** (1 - report.mass_exponent) * np.exp(rr),
             label="w·r^(1-M/2)·e^r")
    ax2.set_xlabel("r")
    ax2.set_title("compensated tails")
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def ring_kernel_figure(ks, ratios, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.semilogx(ks, ratios, "o-", ms=3)
    ax.axhline(1.0, color="gray", lw=0.8, ls="--", label="nominal scale")
    ax.axhline(0.5, color="gray", lw=0.8, ls=":", label="true limit 1/2")
    ax.set_xlabel("k")
    ax.set_ylabel("g(x,x,k)·πx / (2k ln k)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def landscape_figure(scan, maximizer, path) -> None:
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    finite = scan.values[np.isfinite(scan.values)]
    vmin = np.percentile(finite, 5) if finite.size else None
    pc = ax.pcolormesh(scan.xs, scan.ys, scan.values.T, shading="auto",
                       vmin=vmin, cmap="viridis")
    fig.colorbar(pc, ax=ax, label="f(x, y)")
    if maximizer is not None:
        ax.plot([maximizer.x_star], [maximizer.y_star], "r*", ms=12,
                label=f"max ({maximizer.x_star:.3f}, {maximizer.y_star:.3f})")
        ax.legend(loc="lower right")
    ax.set_xlabel("x (rescaled inner radius)")
    ax.set_ylabel("y (rescaled outer radius)")
    ax.set_title(f"landscape, k = {scan.k}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def residual_scaling_figure(study, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ks = sorted({row.k for row in study.rows})
    for k in ks:
        rows = [r for r in study.rows if r.k == k]
        ax.loglog([r.radius for r in rows], [r.per_peak for r in rows],
                  "o-", ms=4, label=f"k = {k}")
    ax.set_xlabel("ring radius")
    ax.set_ylabel("per-peak residual")
    if math.isfinite(study.fitted_exponent):
        ax.set_title(f"fitted k-exponent {study.fitted_exponent:+.3f}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def expansion_figure(labels, grid_vals, pair_vals, path) -> None:
    x = np.arange(len(labels))
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.bar(x - 0.18, grid_vals, width=0.36, label="grid")
    ax.bar(x + 0.18, pair_vals, width=0.36, label="pairwise")
    ax.set_xticks(x)
    ax.set_xticklabels(labels)
    ax.axhline(0, color="k", lw=0.8)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
