"""Scatter overlays of point clouds and training curves."""

from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib.pyplot as plt
import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.metric_geometry import as_points
from manifoldlab.visualization.styles import add_stats_box, class_color, get_color, get_label

# Orthographic view of R^3: azimuth 30 degrees, elevation 20 degrees.
_AZIMUTH = np.radians(30.0)
_ELEVATION = np.radians(20.0)
VIEW_BASIS = np.array(
    [
        [np.cos(_AZIMUTH), np.sin(_AZIMUTH), 0.0],
        [
            -np.sin(_ELEVATION) * np.sin(_AZIMUTH),
            np.sin(_ELEVATION) * np.cos(_AZIMUTH),
            np.cos(_ELEVATION),
        ],
    ]
)


def project_2d(points: ArrayLike) -> NDArray[np.float64]:
    """
    Flatten a cloud to the plane.

    Clouds in R^1 get a zero second coordinate, clouds in R^2 are kept,
    and higher-dimensional clouds are cut to their first three coordinates
    and projected orthographically.
    """
    p = as_points(points)
    if p.shape[1] == 1:
        return np.hstack([p, np.zeros_like(p)])
    if p.shape[1] == 2:
        return p
    return p[:, :3] @ VIEW_BASIS.T


def plot_cloud_overlay(
    target: ArrayLike,
    generated: ArrayLike,
    title: Optional[str] = None,
    stats: Optional[dict] = None,
    ax: Optional[plt.Axes] = None,
    figsize: tuple = (6, 6),
) -> plt.Figure:
    """
    Scatter a generated cloud over a target cloud.

    Parameters
    ----------
    target : array_like
        Reference sample of the manifold.
    generated : array_like
        Image of the latent grid.
    title : str, optional
        Plot title.
    stats : dict, optional
        Values shown in a text box (e.g. Hausdorff distance).
    ax : plt.Axes, optional
        Existing axes to plot on.
    figsize : tuple, optional
        Figure size when creating a new figure.

    Returns
    -------
    plt.Figure
    """
    if ax is None:
        fig, ax = plt.subplots(figsize=figsize)
    else:
        fig = ax.get_figure()

    t = project_2d(target)
    g = project_2d(generated)
    planar = as_points(target).shape[1] <= 2
    ax.scatter(t[:, 0], t[:, 1], s=4, color=get_color("target"), alpha=0.5, label="target")
    ax.scatter(g[:, 0], g[:, 1], s=2, color=get_color("generated"), alpha=0.7, label="generated")
    ax.set_xlabel(get_label("x1" if planar else "projected_x"))
    ax.set_ylabel(get_label("x2" if planar else "projected_y"))
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="lower right")
    if title:
        ax.set_title(title)
    if stats:
        add_stats_box(ax, stats)
    return fig


def plot_class_clouds(
    clouds: Sequence[ArrayLike],
    references: Sequence[ArrayLike],
    title: Optional[str] = None,
    figsize: tuple = (6, 6),
) -> plt.Figure:
    """Per-class overlay: each class's generated cloud on its reference."""
    fig, ax = plt.subplots(figsize=figsize)
    for i, (cloud, ref) in enumerate(zip(clouds, references)):
        r = project_2d(ref)
        c = project_2d(cloud)
        ax.scatter(r[:, 0], r[:, 1], s=4, color=get_color("target"), alpha=0.4)
        ax.scatter(c[:, 0], c[:, 1], s=2, color=class_color(i), label=f"class {i}")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="lower right")
    if title:
        ax.set_title(title)
    return fig


def plot_loss_history(
    histories: dict,
    title: Optional[str] = None,
    figsize: tuple = (8, 5),
) -> plt.Figure:
    """Training loss curves on a log scale, one per named history."""
    fig, ax = plt.subplots(figsize=figsize)
    for i, (name, history) in enumerate(histories.items()):
        color = get_color(name) if name in ("forward", "backward") else class_color(i)
        ax.semilogy(np.arange(len(history)), history, color=color, label=name)
    ax.set_xlabel(get_label("epoch"))
    ax.set_ylabel(get_label("mse"))
    ax.legend()
    if title:
        ax.set_title(title)
    return fig


def save_svg(fig: plt.Figure, path: Union[str, Path]) -> Path:
    """Write ``fig`` as SVG and close it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
