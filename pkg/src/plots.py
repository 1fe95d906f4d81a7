"""Module for the SVG figures written by the evaluation and table commands."""
import os
from typing import Any, Dict, List

import matplotlib

matplotlib.use("Agg")
from matplotlib import pyplot as plt  # pylint: disable=wrong-import-position
import numpy as np  # pylint: disable=wrong-import-position

from src.metrics.distribution import kde_1d, reference_density  # pylint: disable=wrong-import-position
from src.utils import LOGGER as logger  # pylint: disable=wrong-import-position

# fixed ids and no date keep the files byte-stable across runs
plt.rcParams["svg.hashsalt"] = "msrl"


def _save(fig, path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"[PLOTS] Figure saved in {path}")


def plot_response_scatter(path: str, r: np.ndarray, y: np.ndarray) -> None:
    """Scatter the response against each representation component."""
    r = np.atleast_2d(r.T).T
    d0 = r.shape[1]
    fig, axes = plt.subplots(1, d0, figsize=(4 * d0, 3.5), squeeze=False)
    for j in range(d0):
        axes[0, j].scatter(r[:, j], np.asarray(y).reshape(len(r), -1)[:, 0], s=3, alpha=0.5)
        axes[0, j].set_xlabel(f"R{j + 1}(X)")
        axes[0, j].set_ylabel("Y")
    fig.tight_layout()
    _save(fig, path)


def plot_component_kde(path: str, r: np.ndarray, reference: str = "uniform01") -> None:
    """Plot the kernel density of each component next to the reference density."""
    r = np.atleast_2d(r.T).T
    d0 = r.shape[1]
    lower = min(r.min(), -1.0) - 0.25
    upper = max(r.max(), 1.0) + 0.25
    grid = np.linspace(lower, upper, 400)
    fig, axes = plt.subplots(1, d0, figsize=(4 * d0, 3.5), squeeze=False)
    for j in range(d0):
        axes[0, j].plot(grid, kde_1d(r[:, j], None, grid), label="estimate")
        axes[0, j].plot(grid, reference_density(reference, grid), "--", label=reference)
        axes[0, j].set_xlabel(f"R{j + 1}(X)")
        axes[0, j].legend()
    fig.tight_layout()
    _save(fig, path)


def plot_component_pairs(path: str, r: np.ndarray, y: np.ndarray) -> None:
    """Scatter the first two components, coloured by the sign of the response."""
    positive = np.asarray(y).reshape(len(r), -1)[:, 0] >= 0
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.scatter(r[positive, 0], r[positive, 1], s=3, alpha=0.5, label="Y >= 0")
    ax.scatter(r[~positive, 0], r[~positive, 1], s=3, alpha=0.5, label="Y < 0")
    ax.set_xlabel("R1(X)")
    ax.set_ylabel("R2(X)")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_table_cell(path: str, rows: List[Dict[str, Any]]) -> None:
    """Bar chart of DC and APE (mean with standard error) per method of one cell."""
    methods = [row["method"] for row in rows]
    fig, axes = plt.subplots(1, 2, figsize=(7, 3))
    for ax, metric in zip(axes, ("dc", "ape")):
        ax.bar(
            methods,
            [row[f"{metric}_mean"] for row in rows],
            yerr=[row[f"{metric}_se"] for row in rows],
            capsize=3,
        )
        ax.set_title(metric.upper())
    fig.suptitle(f"Model {rows[0]['model']}, scenario ({rows[0]['scenario']})")
    fig.tight_layout()
    _save(fig, path)
