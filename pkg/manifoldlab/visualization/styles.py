"""Shared colors, labels and matplotlib configuration for manifoldlab plots."""

from typing import Any, Mapping, Optional

import matplotlib.pyplot as plt

from manifoldlab.reports.formatters import format_value

try:
    import seaborn as sns

    HAS_SEABORN = True
except ImportError:
    HAS_SEABORN = False


# =============================================================================
# Color Palettes
# =============================================================================

COLORS = {
    # Point clouds
    "target": "#7f7f7f",  # gray
    "generated": "#d62728",  # red
    # Training
    "loss": "#1f77b4",  # blue
    "forward": "#1f77b4",  # blue
    "backward": "#ff7f0e",  # orange
    # Multiclass
    "gap": "#bcbd22",  # olive
}

# Color palette for per-class series
PALETTE = [
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
]

LABELS = {
    "x1": "x1",
    "x2": "x2",
    "projected_x": "projected x",
    "projected_y": "projected y",
    "epoch": "Epoch",
    "mse": "Mean squared error",
}


# =============================================================================
# Style Configuration
# =============================================================================


def setup_manifoldlab_style() -> None:
    """
    Set up global matplotlib/seaborn style for manifoldlab plots.

    Uses the seaborn whitegrid theme when seaborn is installed.

    Examples
    --------
    >>> from manifoldlab.visualization import setup_manifoldlab_style
    >>> setup_manifoldlab_style()
    """
    if HAS_SEABORN:
        sns.set_theme(style="whitegrid", palette="colorblind")

    plt.rcParams.update(
        {
            "figure.figsize": (6, 6),
            "figure.dpi": 100,
            "figure.facecolor": "white",
            "font.size": 11,
            "axes.titlesize": 13,
            "axes.labelsize": 11,
            "legend.fontsize": 10,
            "axes.grid": True,
            "grid.alpha": 0.3,
            "lines.markersize": 4,
            "axes.spines.top": False,
            "axes.spines.right": False,
            "svg.hashsalt": "manifoldlab",
        }
    )


def get_label(key: str) -> str:
    """
    Axis label for a given key.

    Examples
    --------
    >>> get_label('epoch')
    'Epoch'
    """
    return LABELS.get(key, key)


def get_color(key: str) -> str:
    """
    Color for a given element type.

    Examples
    --------
    >>> get_color('generated')
    '#d62728'
    """
    return COLORS.get(key, "#333333")


def class_color(index: int) -> str:
    """Palette color for class ``index``, cycling."""
    return PALETTE[index % len(PALETTE)]


# =============================================================================
# Stats Box
# =============================================================================

_STATS_ANCHORS = {
    "upper right": (0.98, 0.98, "right", "top"),
    "upper left": (0.02, 0.98, "left", "top"),
    "lower right": (0.98, 0.02, "right", "bottom"),
    "lower left": (0.02, 0.02, "left", "bottom"),
}


def format_stats(
    stats: Mapping[str, Any],
    title: Optional[str] = None,
    digits: int = 4,
) -> str:
    """
    Aligned ``key = value`` lines with report-table number formatting.

    Values go through :func:`manifoldlab.reports.formatters.format_value`,
    so a stats box shows the same text as the Markdown report.

    Examples
    --------
    >>> print(format_stats({'d_H': 0.0123, 'points': 2048}))
    d_H    = 0.0123
    points = 2048
    """
    width = max((len(str(key)) for key in stats), default=0)
    lines = [title, "-" * len(title)] if title else []
    lines.extend(
        f"{str(key):<{width}} = {format_value(value, digits)}" for key, value in stats.items()
    )
    return "\n".join(lines)


def add_stats_box(
    ax: plt.Axes,
    stats: Mapping[str, Any],
    loc: str = "upper right",
    title: Optional[str] = None,
    digits: int = 4,
) -> None:
    """Draw :func:`format_stats` text in a corner of ``ax``; unknown ``loc`` is upper right."""
    x, y, ha, va = _STATS_ANCHORS.get(loc, _STATS_ANCHORS["upper right"])
    ax.text(
        x,
        y,
        format_stats(stats, title, digits),
        transform=ax.transAxes,
        fontsize=9,
        verticalalignment=va,
        horizontalalignment=ha,
        bbox=dict(boxstyle="round", facecolor="white", alpha=0.9),
        family="monospace",
    )
