"""Figure rendering for the CLI report path.

Each experiment gets a compact matplotlib figure saved next to its CSV/JSON
outputs. Rendering is headless (Agg) and intentionally plain: heatmaps for
probability matrices, line plots for curves, greyscale panels for images.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def _save(fig, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def clone_fidelity_figure(
    path: Path, dims, mean_fidelities, clone_curve, estimation_curve
) -> None:
    """Measured average fidelity per dimension with both analytic benchmarks."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    grid = np.linspace(min(dims), max(dims), 200)
    ax.plot(grid, 0.5 + 1.0 / (1.0 + grid), "-", color="tab:blue", label="optimal cloning")
    ax.plot(grid, 2.0 / (1.0 + grid), "--", color="tab:gray", label="state estimation")
    ax.plot(dims, mean_fidelities, "o", color="tab:red", label="simulated")
    ax.set_xlabel("dimension d")
    ax.set_ylabel("cloning fidelity")
    ax.set_ylim(0, 1)
    ax.legend(frameon=False)
    _save(fig, path)


def matrix_grid_figure(path: Path, matrices, titles, suptitle=None, vmax=None) -> None:
    """Row of probability-matrix heatmaps sharing one color scale."""
    n = len(matrices)
    ncols = min(n, 4)
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(2.6 * ncols, 2.6 * nrows), squeeze=False
    )
    vmax = vmax or max(float(np.max(m)) for m in matrices)
    im = None
    for k, (mat, title) in enumerate(zip(matrices, titles)):
        ax = axes[k // ncols][k % ncols]
        im = ax.imshow(mat, vmin=0.0, vmax=vmax, cmap="viridis")
        ax.set_title(title, fontsize=9)
        ax.set_xlabel("input state")
        ax.set_ylabel("detected state")
    for k in range(n, nrows * ncols):
        axes[k // ncols][k % ncols].axis("off")
    fig.colorbar(im, ax=axes, shrink=0.8)
    if suptitle:
        fig.suptitle(suptitle)
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def tomography_figure(path: Path, panels) -> None:
    """Real and imaginary parts of reconstructed vs expected density matrices.

    panels: list of (title, matrix) pairs; each contributes an Re and Im
    heatmap column.
    """
    n = len(panels)
    fig, axes = plt.subplots(2, n, figsize=(2.4 * n, 4.6), squeeze=False)
    lim = max(float(np.abs(m).max()) for _, m in panels)
    for k, (title, mat) in enumerate(panels):
        for row, part in enumerate((mat.real, mat.imag)):
            ax = axes[row][k]
            ax.imshow(part, vmin=-lim, vmax=lim, cmap="RdBu_r")
            ax.set_xticks([])
            ax.set_yticks([])
        axes[0][k].set_title(title, fontsize=9)
    axes[0][0].set_ylabel("Re")
    axes[1][0].set_ylabel("Im")
    _save(fig, path)


def hom_figure(path: Path, dip, enhancement, visibility) -> None:
    """Interference dip and coalescence enhancement over the delay grid."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(7.6, 3.2))
    ax1.plot(dip[:, 0], dip[:, 1], "-", color="tab:blue")
    ax1.set_xlabel("delay")
    ax1.set_ylabel("cross-port coincidences")
    ax1.set_title(f"interference dip (v={visibility:g})", fontsize=10)
    ax2.plot(enhancement[:, 0], enhancement[:, 1], "-", color="tab:orange")
    ax2.axhline(2.0, color="tab:gray", lw=0.8, ls="--")
    ax2.set_xlabel("delay")
    ax2.set_ylabel("same-port enhancement")
    ax2.set_ylim(0.9, 2.1)
    ax2.set_title("coalescence peak", fontsize=10)
    _save(fig, path)


def image_panels_figure(path: Path, panels) -> None:
    """Greyscale image strip: (title, 2-d uint8 array) pairs."""
    n = len(panels)
    fig, axes = plt.subplots(1, n, figsize=(2.4 * n, 2.8), squeeze=False)
    for k, (title, img) in enumerate(panels):
        ax = axes[0][k]
        ax.imshow(img, cmap="gray", vmin=0, vmax=255)
        ax.set_title(title, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    _save(fig, path)
