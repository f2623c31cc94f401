"""Figure renderers for pipeline artifacts.

All renderers draw with the Agg backend and write deterministic PNGs: same
artifact in, same bytes out. Arrival-style panels share a 0-48 h scale with
the background sentinel rendered as the top of the scale; agreement maps use
the black/blue/red convention (agreement / false negative / false positive).
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap

from firefront.contours import find_contours
from firefront.rasters import BACKGROUND_HOURS, Field

_HOURS_CMAP = "inferno"


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _hours_panel(ax, values, title):
    im = ax.imshow(values, cmap=_HOURS_CMAP, vmin=0.0, vmax=BACKGROUND_HOURS,
                   interpolation="nearest")
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
    return im


def plot_tuple(tau: Field, taubar: Field, terrain: Field, path) -> Path:
    """Three-panel training tuple: target arrival, measurement, terrain."""
    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    im0 = _hours_panel(axes[0], tau.values, "arrival (h)")
    im1 = _hours_panel(axes[1], taubar.values, "measurement (h)")
    im2 = axes[2].imshow(terrain.values, cmap="terrain", interpolation="nearest")
    axes[2].set_title("terrain (m)")
    axes[2].set_xticks([]), axes[2].set_yticks([])
    for im, ax in ((im0, axes[0]), (im1, axes[1]), (im2, axes[2])):
        fig.colorbar(im, ax=ax, shrink=0.8)
    return _save(fig, path)


def plot_inputs(taubar: Field, terrain: Field, path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(8.5, 4))
    im0 = _hours_panel(axes[0], taubar.values, "measurement (h)")
    im1 = axes[1].imshow(terrain.values, cmap="terrain", interpolation="nearest")
    axes[1].set_title("terrain (m)")
    axes[1].set_xticks([]), axes[1].set_yticks([])
    fig.colorbar(im0, ax=axes[0], shrink=0.8)
    fig.colorbar(im1, ax=axes[1], shrink=0.8)
    return _save(fig, path)


def plot_mean_std(mean: Field, std: np.ndarray, path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(8.5, 4))
    im0 = _hours_panel(axes[0], mean.values, "mean arrival (h)")
    im1 = axes[1].imshow(std, cmap="viridis", interpolation="nearest")
    axes[1].set_title("std of arrival (h)")
    axes[1].set_xticks([]), axes[1].set_yticks([])
    fig.colorbar(im0, ax=axes[0], shrink=0.8)
    fig.colorbar(im1, ax=axes[1], shrink=0.8)
    return _save(fig, path)


def plot_contour_map(mean: Field, path, interval_hours: float = 4.0) -> Path:
    """Arrival contours at fixed intervals over the mean map."""
    fig, ax = plt.subplots(figsize=(6, 5))
    im = _hours_panel(ax, mean.values, f"arrival contours every {interval_hours:g} h")
    levels = np.arange(interval_hours, BACKGROUND_HOURS, interval_hours)
    for level in levels:
        for line in find_contours(mean.values, float(level)):
            ax.plot(line[:, 1], line[:, 0], color="white", linewidth=0.7)
    fig.colorbar(im, ax=ax, shrink=0.85)
    return _save(fig, path)


def plot_agreement(codes: np.ndarray, path) -> Path:
    """Black agreement, blue false negative, red false positive."""
    cmap = ListedColormap(["white", "black", "tab:blue", "tab:red"])
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.imshow(codes, cmap=cmap, vmin=0, vmax=3, interpolation="nearest")
    ax.set_xticks([]), ax.set_yticks([])
    handles = [plt.Rectangle((0, 0), 1, 1, color=c)
               for c in ("black", "tab:blue", "tab:red")]
    ax.legend(handles, ["agreement", "false negative", "false positive"],
              loc="upper right", fontsize=8)
    return _save(fig, path)


def plot_ablation_histogram(ablation: dict, path) -> Path:
    """Histogram of flat-minus-true mean arrival differences (hours)."""
    edges = np.asarray(ablation["bin_edges"])
    counts = np.asarray(ablation["counts"])
    centers = 0.5 * (edges[:-1] + edges[1:])
    nonzero = counts > 0
    span = 2.0 if not nonzero.any() else max(2.0, np.abs(centers[nonzero]).max() * 1.2)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(centers, counts, width=edges[1] - edges[0], color="tab:orange")
    ax.set_xlim(-span, span)
    ax.set_xlabel("flat-terrain minus true-terrain mean arrival (h)")
    ax.set_ylabel("pixels")
    ax.set_title(f"mean diff {ablation['mean_diff_hours'] * 60:.1f} min, "
                 f"{100 * ablation['frac_within_half_hour']:.1f}% within 30 min")
    return _save(fig, path)


def plot_raster(field: Field, path) -> Path:
    """Single-panel heat map; arrival-style fields share the 0-48 h scale."""
    fig, ax = plt.subplots(figsize=(5.5, 5))
    if field.kind in ("arrival", "measurement"):
        im = _hours_panel(ax, field.values, f"{field.kind} (h)")
    else:
        im = ax.imshow(field.values, cmap="terrain" if field.kind == "terrain" else "viridis",
                       interpolation="nearest")
        ax.set_title(f"{field.kind} ({field.units})" if field.units else field.kind)
        ax.set_xticks([]), ax.set_yticks([])
    fig.colorbar(im, ax=ax, shrink=0.85)
    return _save(fig, path)


def plot_training_curves(metrics: list[dict], path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    epochs = [m["epoch"] for m in metrics]
    axes[0].plot(epochs, [m["critic_objective"] for m in metrics], label="critic objective")
    axes[0].plot(epochs, [m["gen_loss"] for m in metrics], label="generator loss")
    axes[0].plot(epochs, [m["penalty"] for m in metrics], label="penalty")
    axes[0].set_xlabel("epoch")
    axes[0].legend(fontsize=8)
    axes[1].plot(epochs, [m["val_mismatch"] for m in metrics], color="tab:red")
    axes[1].set_xlabel("epoch")
    axes[1].set_ylabel("validation mismatch")
    fig.tight_layout()
    return _save(fig, path)
