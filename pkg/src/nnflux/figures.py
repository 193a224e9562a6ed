"""Figures written next to the CSV outputs of the harness.

Every function takes plain arrays, writes one PNG and returns its path.
The non-interactive Agg backend is used throughout.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.collections import PolyCollection  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def loss_history(path, histories):
    """``histories`` maps a label to a per-epoch loss sequence."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, loss in histories.items():
        ax.semilogy(np.arange(1, len(loss) + 1), loss, label=label)
    ax.set_xlabel("epoch")
    ax.set_ylabel("relative loss")
    ax.legend()
    return _save(fig, path)


def flux_scatter(path, reference, predictions, component_names):
    """Predicted versus Godunov flux, one panel per component."""
    m = reference.shape[1]
    fig, axes = plt.subplots(1, m, figsize=(4.2 * m, 4), squeeze=False)
    for k, ax in enumerate(axes[0]):
        lo, hi = reference[:, k].min(), reference[:, k].max()
        for label, pred in predictions.items():
            ax.scatter(reference[:, k], pred[:, k], s=3, alpha=0.5, label=label)
        ax.plot([lo, hi], [lo, hi], "k--", lw=0.8)
        ax.set_xlabel(f"Godunov {component_names[k]}")
        ax.set_ylabel("prediction")
    axes[0][0].legend(markerscale=4)
    return _save(fig, path)


def error_histogram(path, errors, component_names, bins):
    """Histogram of absolute errors on log-spaced ``bins``."""
    m = len(component_names)
    fig, axes = plt.subplots(1, m, figsize=(4.2 * m, 3.5), squeeze=False)
    for k, ax in enumerate(axes[0]):
        for label, err in errors.items():
            ax.hist(np.clip(err[:, k], bins[0], bins[-1]), bins=bins, histtype="step", label=label)
        ax.set_xscale("log")
        ax.set_xlabel(f"absolute error ({component_names[k]})")
        ax.set_ylabel("count")
    axes[0][0].legend()
    return _save(fig, path)


def profiles_1d(path, x, fields, component_names, title=""):
    """Line profiles of each component; ``fields`` maps a label to ``(n, m)``."""
    m = len(component_names)
    fig, axes = plt.subplots(1, m, figsize=(4.2 * m, 3.5), squeeze=False)
    for k, ax in enumerate(axes[0]):
        for label, U in fields.items():
            ax.plot(x, U[:, k], label=label, lw=1)
        ax.set_xlabel("x")
        ax.set_ylabel(component_names[k])
    axes[0][0].legend()
    if title:
        fig.suptitle(title)
    return _save(fig, path)


def field_2d(path, mesh, values, label="", cmap="viridis"):
    """Cell values on a 2D mesh drawn as filled polygons."""
    fig, ax = plt.subplots(figsize=(5, 4.5))
    polys = [mesh.nodes[list(e)] for e in mesh.elements]
    coll = PolyCollection(polys, array=np.asarray(values), cmap=cmap, edgecolors="none")
    ax.add_collection(coll)
    ax.autoscale_view()
    ax.set_aspect("equal")
    fig.colorbar(coll, ax=ax, label=label)
    return _save(fig, path)
