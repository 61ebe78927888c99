"""Geodesic integration, exponential map and speed conservation."""

from manifoldlab.geodesics.exponential import (
    default_steps,
    exp_map,
    exp_map_batch,
)
from manifoldlab.geodesics.integrator import (
    BatchIntegration,
    GeodesicState,
    GeodesicTrajectory,
    integrate_geodesic,
    integrate_geodesics,
    metric_speeds,
    speed_drift,
    speed_drift_batch,
)

__all__ = [
    "GeodesicState",
    "GeodesicTrajectory",
    "BatchIntegration",
    "integrate_geodesic",
    "integrate_geodesics",
    "exp_map",
    "exp_map_batch",
    "default_steps",
    "metric_speeds",
    "speed_drift",
    "speed_drift_batch",
]
