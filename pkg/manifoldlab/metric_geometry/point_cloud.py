"""Finite point clouds standing in for manifolds and generated sets."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import cKDTree

from manifoldlab.exceptions import InvalidParameterError, ShapeError


@dataclass(frozen=True)
class PointCloud:
    """
    Finite set of ambient points.

    Attributes
    ----------
    points : NDArray[np.float64]
        Array of shape ``(N, n)`` with finite entries.
    label : str, optional
        Name written to the CSV header.
    """

    points: NDArray[np.float64]
    label: Optional[str] = None

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise ShapeError(f"points must be a 2-d array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidParameterError("point coordinates must be finite")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points: ArrayLike, label: Optional[str] = None) -> "PointCloud":
        """Build from any array-like of shape ``(N, n)``."""
        return cls(np.asarray(points, dtype=np.float64), label)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        """Ambient dimension n."""
        return int(self.points.shape[1])

    def to_csv(self, path: Union[str, Path]) -> Path:
        """
        Write one point per row with a '#'-prefixed header.

        The header carries ``dim=<n>`` and ``label=<label>``. Values are
        written with 17 significant digits so they read back exactly.
        """
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        header = f"dim={self.dim}\nlabel={self.label or ''}"
        np.savetxt(
            target, self.points, delimiter=",", header=header, comments="# ", fmt="%.17g"
        )
        return target

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "PointCloud":
        """
        Read a cloud written by :meth:`to_csv`.

        Raises
        ------
        ShapeError
            If the column count disagrees with the header dimension.
        """
        source = Path(path)
        dim: Optional[int] = None
        label: Optional[str] = None
        with source.open(encoding="utf-8") as handle:
            for line in handle:
                if not line.startswith("#"):
                    break
                key, _, value = line.lstrip("# ").rstrip("\n").partition("=")
                if key == "dim":
                    dim = int(value)
                elif key == "label":
                    label = value or None
        data = np.loadtxt(source, delimiter=",", comments="#", ndmin=2)
        if data.size == 0:
            data = np.empty((0, dim or 0))
        if dim is not None and data.shape[1] != dim:
            raise ShapeError(
                f"{source.name}: header says dim={dim}, found {data.shape[1]} columns"
            )
        return cls(data, label)


def as_points(cloud: Union[PointCloud, ArrayLike]) -> NDArray[np.float64]:
    """Coerce a PointCloud or array-like to an ``(N, n)`` float array."""
    if isinstance(cloud, PointCloud):
        return cloud.points
    return PointCloud(np.asarray(cloud, dtype=np.float64)).points


def net_fineness(cloud: Union[PointCloud, ArrayLike]) -> float:
    """
    Largest nearest-neighbour gap within a cloud.

    Quantifies how finely a finite sample represents a continuous set.
    A cloud with fewer than two points has fineness 0.

    Examples
    --------
    >>> net_fineness([[0.0], [1.0], [3.0]])
    2.0
    """
    pts = as_points(cloud)
    if pts.shape[0] < 2:
        return 0.0
    distances, _ = cKDTree(pts).query(pts, k=2)
    return float(np.max(distances[:, 1]))


def median_spacing(points: NDArray[np.float64]) -> float:
    """Median nearest-neighbour distance (0 for fewer than two points)."""
    if points.shape[0] < 2:
        return 0.0
    distances, _ = cKDTree(points).query(points, k=2)
    return float(np.median(distances[:, 1]))
