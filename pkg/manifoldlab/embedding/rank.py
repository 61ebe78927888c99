"""Numeric rank by Gaussian elimination with complete pivoting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import InvalidParameterError

EPS = float(np.finfo(np.float64).eps)


@dataclass
class RankReport:
    """
    Result of :func:`numeric_rank`.

    Attributes
    ----------
    numeric_rank : int
        Number of leading pivots above ``tolerance``.
    tolerance : float
        Absolute pivot threshold used.
    full_rank : bool
        ``numeric_rank == min(rows, cols)``.
    min_retained_pivot : float
        Smallest |pivot| counted in the rank (0 for a zero matrix).
    shape : tuple of int
        Matrix shape.
    pivots : NDArray[np.float64]
        |pivot| at every elimination step, in order.
    """

    numeric_rank: int
    tolerance: float
    full_rank: bool
    min_retained_pivot: float
    shape: tuple[int, int]
    pivots: NDArray[np.float64] = field(repr=False)

    def rank_at(self, tolerance: float) -> int:
        """Rank the same elimination gives under another tolerance."""
        below = np.flatnonzero(self.pivots <= tolerance)
        return int(below[0]) if below.size else int(self.pivots.size)

    def to_dict(self) -> dict[str, Any]:
        return {
            "numeric_rank": self.numeric_rank,
            "tolerance": self.tolerance,
            "full_rank": self.full_rank,
            "min_retained_pivot": self.min_retained_pivot,
            "shape": list(self.shape),
        }


def eliminate(matrix: ArrayLike) -> NDArray[np.float64]:
    """
    |pivot| sequence of complete-pivoting elimination.

    Stops early only when the remaining block is exactly zero.
    """
    a = np.array(matrix, dtype=np.float64)
    if a.ndim != 2:
        raise InvalidParameterError(f"matrix must be 2-d, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidParameterError("matrix entries must be finite")
    rows, cols = a.shape
    pivots = []
    for k in range(min(rows, cols)):
        block = np.abs(a[k:, k:])
        r, c = divmod(int(np.argmax(block)), cols - k)
        value = block[r, c]
        if value == 0.0:
            break
        pivots.append(value)
        r, c = r + k, c + k
        a[[k, r], :] = a[[r, k], :]
        a[:, [k, c]] = a[:, [c, k]]
        factors = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k:] -= np.outer(factors, a[k, k:])
    return np.asarray(pivots, dtype=np.float64)


def default_tolerance(matrix: NDArray[np.float64]) -> float:
    """max(rows, cols) * eps * largest |entry| (the first complete pivot)."""
    if matrix.size == 0:
        return 0.0
    return max(matrix.shape) * EPS * float(np.max(np.abs(matrix)))


def numeric_rank(matrix: ArrayLike, tolerance: Optional[float] = None) -> RankReport:
    """
    Numeric rank of a matrix.

    Parameters
    ----------
    matrix : array_like
        Finite 2-d array.
    tolerance : float, optional
        Absolute pivot threshold; defaults to
        ``max(rows, cols) * eps * largest initial pivot``.

    Returns
    -------
    RankReport

    Examples
    --------
    >>> numeric_rank(np.eye(5)).numeric_rank
    5
    >>> numeric_rank(np.outer([1.0, 2.0, 3.0], [4.0, 5.0])).numeric_rank
    1
    """
    a = np.asarray(matrix, dtype=np.float64)
    pivots = eliminate(a)
    tol = default_tolerance(a) if tolerance is None else float(tolerance)
    if tol < 0:
        raise InvalidParameterError(f"tolerance must be nonnegative, got {tol}")
    shape = (int(a.shape[0]), int(a.shape[1]))
    report = RankReport(
        numeric_rank=0,
        tolerance=tol,
        full_rank=False,
        min_retained_pivot=0.0,
        shape=shape,
        pivots=pivots,
    )
    rank = report.rank_at(tol)
    report.numeric_rank = rank
    report.full_rank = rank == min(shape)
    report.min_retained_pivot = float(pivots[rank - 1]) if rank else 0.0
    return report


def rank_is_stable(report: RankReport, factor: float = 10.0) -> bool:
    """Whether the rank is unchanged at tolerance / factor and tolerance * factor."""
    tol = report.tolerance
    return report.rank_at(tol / factor) == report.rank_at(tol * factor) == report.numeric_rank
