"""Hausdorff distances between finite point clouds."""

from manifoldlab.metric_geometry.hausdorff import (
    BRUTE_FORCE_CAP,
    GridIndex,
    brute_force_directed,
    brute_force_hausdorff,
    directed_hausdorff,
    hausdorff,
)
from manifoldlab.metric_geometry.point_cloud import (
    PointCloud,
    as_points,
    median_spacing,
    net_fineness,
)

__all__ = [
    "PointCloud",
    "as_points",
    "net_fineness",
    "median_spacing",
    "GridIndex",
    "directed_hausdorff",
    "hausdorff",
    "brute_force_directed",
    "brute_force_hausdorff",
    "BRUTE_FORCE_CAP",
]
