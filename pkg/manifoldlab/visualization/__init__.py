"""Visualization module for manifoldlab.

Flat SVG scatter overlays of point clouds and training curves.

Requirements
------------
This module requires matplotlib; seaborn is optional.
Install with: pip install manifoldlab[visualization]

Examples
--------
>>> from manifoldlab.visualization import plot_cloud_overlay, save_svg
>>> fig = plot_cloud_overlay(target, generated, title="circle")
>>> save_svg(fig, "overlay.svg")
"""

try:
    import matplotlib.pyplot as plt

    HAS_MATPLOTLIB = True
except ImportError:
    HAS_MATPLOTLIB = False


def _check_visualization_deps() -> None:
    """Check if visualization dependencies are installed."""
    if not HAS_MATPLOTLIB:
        raise ImportError(
            "manifoldlab.visualization requires matplotlib. "
            "Install with: pip install manifoldlab[visualization]"
        )


if HAS_MATPLOTLIB:
    from manifoldlab.visualization.clouds import (
        VIEW_BASIS,
        plot_class_clouds,
        plot_cloud_overlay,
        plot_loss_history,
        project_2d,
        save_svg,
    )
    from manifoldlab.visualization.styles import (
        COLORS,
        PALETTE,
        add_stats_box,
        class_color,
        format_stats,
        get_color,
        get_label,
        setup_manifoldlab_style,
    )

__all__ = [
    "HAS_MATPLOTLIB",
    # Styles
    "COLORS",
    "PALETTE",
    "setup_manifoldlab_style",
    "get_color",
    "get_label",
    "class_color",
    "format_stats",
    "add_stats_box",
    # Plots
    "VIEW_BASIS",
    "project_2d",
    "plot_cloud_overlay",
    "plot_class_clouds",
    "plot_loss_history",
    "save_svg",
]
