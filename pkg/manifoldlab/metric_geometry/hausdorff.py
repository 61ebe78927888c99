"""Exact Hausdorff distances between finite point clouds.

The directed distance max_x min_y |x - y| is computed exactly. The fast
path buckets the target cloud into a uniform grid whose cell size is the
median nearest-neighbour spacing of the target. For a query x only the
3^n cells around its own cell are scanned; a candidate within one cell
size is then provably the nearest point because every point outside that
block differs from x by more than one cell size in some coordinate. When
the block is empty or its best candidate is farther than one cell size,
the query falls back to an exhaustive scan.

Squared distances are accumulated coordinate by coordinate in the same
order on both paths, so the fast path and the brute-force oracle agree
bit for bit.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import InvalidParameterError, ResourceError, ShapeError
from manifoldlab.metric_geometry.point_cloud import PointCloud, as_points, median_spacing

logger = logging.getLogger(__name__)

CloudLike = Union[PointCloud, ArrayLike]

BRUTE_FORCE_CAP = 10_000_000
# Slack on the cell-size acceptance test against floor() rounding at cell faces.
_ACCEPT_FRACTION = 0.999
_MAX_OFFSET_ENUMERATION = 81
_BLOCK = 1 << 20


def _squared_distances(
    queries: NDArray[np.float64], targets: NDArray[np.float64]
) -> NDArray[np.float64]:
    acc = np.zeros((queries.shape[0], targets.shape[0]))
    for j in range(queries.shape[1]):
        diff = queries[:, j, None] - targets[None, :, j]
        acc += diff * diff
    return acc


def _min_squared_exhaustive(
    queries: NDArray[np.float64], targets: NDArray[np.float64]
) -> NDArray[np.float64]:
    rows = max(1, _BLOCK // max(1, targets.shape[0]))
    out = np.empty(queries.shape[0])
    for start in range(0, queries.shape[0], rows):
        block = queries[start : start + rows]
        out[start : start + rows] = np.min(_squared_distances(block, targets), axis=1)
    return out


def _validate_pair(x: CloudLike, y: CloudLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    xs, ys = as_points(x), as_points(y)
    if xs.shape[0] == 0 or ys.shape[0] == 0:
        raise InvalidParameterError("point clouds must be nonempty")
    if xs.shape[1] != ys.shape[1]:
        raise ShapeError(
            f"ambient dimensions differ: {xs.shape[1]} vs {ys.shape[1]}"
        )
    return xs, ys


class GridIndex:
    """
    Uniform-grid bucket index over a fixed target cloud.

    Build once, then query read-only. ``cell_size`` defaults to the median
    nearest-neighbour spacing of the targets.
    """

    def __init__(self, targets: NDArray[np.float64], cell_size: float | None = None):
        self.targets = np.asarray(targets, dtype=np.float64)
        self.dim = self.targets.shape[1]
        self.cell_size = median_spacing(self.targets) if cell_size is None else cell_size
        self.origin = np.min(self.targets, axis=0)
        self._buckets: dict[tuple[int, ...], NDArray[np.intp]] = {}
        self._keys = np.empty((0, self.dim), dtype=np.int64)
        if self.cell_size > 0:
            self._build()

    @property
    def usable(self) -> bool:
        """False when the spacing is degenerate and every query is exhaustive."""
        return self.cell_size > 0 and np.isfinite(self.cell_size)

    def cells_of(self, points: NDArray[np.float64]) -> NDArray[np.int64]:
        """Integer cell coordinates of points."""
        return np.floor((points - self.origin) / self.cell_size).astype(np.int64)

    def _build(self) -> None:
        cells = self.cells_of(self.targets)
        groups: dict[tuple[int, ...], list[int]] = defaultdict(list)
        for index, key in enumerate(map(tuple, cells)):
            groups[key].append(index)
        self._buckets = {k: np.asarray(v, dtype=np.intp) for k, v in groups.items()}
        self._keys = np.asarray(list(self._buckets), dtype=np.int64).reshape(-1, self.dim)
        self._key_list = list(self._buckets)
        if 3**self.dim <= _MAX_OFFSET_ENUMERATION:
            self._offsets = list(itertools.product((-1, 0, 1), repeat=self.dim))
        else:
            self._offsets = []

    def neighbourhood(self, cell: tuple[int, ...]) -> NDArray[np.intp]:
        """Target indices in the 3^n block of cells around ``cell``."""
        if self._offsets:
            parts = [
                self._buckets[key]
                for key in (
                    tuple(c + o for c, o in zip(cell, offset)) for offset in self._offsets
                )
                if key in self._buckets
            ]
        else:
            near = np.max(np.abs(self._keys - np.asarray(cell)), axis=1) <= 1
            parts = [self._buckets[self._key_list[i]] for i in np.flatnonzero(near)]
        if not parts:
            return np.empty(0, dtype=np.intp)
        return np.concatenate(parts)

    def min_squared(self, queries: NDArray[np.float64]) -> NDArray[np.float64]:
        """Exact squared distance from each query to its nearest target."""
        if not self.usable:
            return _min_squared_exhaustive(queries, self.targets)
        out = np.empty(queries.shape[0])
        cells = self.cells_of(queries)
        order = np.lexsort(cells.T[::-1])
        sorted_cells = cells[order]
        change = np.any(np.diff(sorted_cells, axis=0) != 0, axis=1)
        starts = np.concatenate([[0], np.flatnonzero(change) + 1, [len(order)]])
        accept = (_ACCEPT_FRACTION * self.cell_size) ** 2
        fallback: list[NDArray[np.intp]] = []
        for a, b in zip(starts[:-1], starts[1:]):
            members = order[a:b]
            candidates = self.neighbourhood(tuple(int(c) for c in sorted_cells[a]))
            if candidates.size == 0:
                fallback.append(members)
                continue
            best = np.min(
                _squared_distances(queries[members], self.targets[candidates]), axis=1
            )
            good = best <= accept
            out[members[good]] = best[good]
            if not np.all(good):
                fallback.append(members[~good])
        if fallback:
            rest = np.concatenate(fallback)
            out[rest] = _min_squared_exhaustive(queries[rest], self.targets)
            logger.debug(
                "grid index: %d of %d queries fell back to exhaustive scan",
                rest.size,
                queries.shape[0],
            )
        return out


def directed_hausdorff(x: CloudLike, y: CloudLike) -> float:
    """
    One-sided Hausdorff distance max_{x in X} min_{y in Y} |x - y|.

    Parameters
    ----------
    x, y : PointCloud or array_like
        Nonempty clouds of equal ambient dimension.

    Returns
    -------
    float
        Exact directed distance.

    Raises
    ------
    ShapeError
        On an ambient dimension mismatch.
    InvalidParameterError
        If either cloud is empty.

    Examples
    --------
    >>> directed_hausdorff([[0.0], [10.0]], [[0.0]])
    10.0
    >>> directed_hausdorff([[0.0]], [[0.0], [10.0]])
    0.0
    """
    xs, ys = _validate_pair(x, y)
    best = GridIndex(ys).min_squared(xs)
    return float(np.sqrt(np.max(best)))


def hausdorff(x: CloudLike, y: CloudLike) -> float:
    """
    Symmetric Hausdorff distance max(d(X, Y), d(Y, X)).

    Examples
    --------
    >>> hausdorff([[0.0, 0.0]], [[3.0, 4.0]])
    5.0
    """
    xs, ys = _validate_pair(x, y)
    return max(directed_hausdorff(xs, ys), directed_hausdorff(ys, xs))


def brute_force_directed(x: CloudLike, y: CloudLike) -> float:
    """Exhaustive directed distance used as the oracle for the grid path."""
    xs, ys = _validate_pair(x, y)
    return float(np.sqrt(np.max(_min_squared_exhaustive(xs, ys))))


def brute_force_hausdorff(x: CloudLike, y: CloudLike) -> float:
    """
    Hausdorff distance by exhaustive double loop.

    Raises
    ------
    ResourceError
        If ``|X| * |Y|`` exceeds 1e7 pairs.
    """
    xs, ys = _validate_pair(x, y)
    pairs = xs.shape[0] * ys.shape[0]
    if pairs > BRUTE_FORCE_CAP:
        raise ResourceError(
            f"brute force limited to {BRUTE_FORCE_CAP} pairs, got {pairs}"
        )
    return max(brute_force_directed(xs, ys), brute_force_directed(ys, xs))
