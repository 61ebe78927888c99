"""Near-full-measure chart subsets and diffeomorphisms between them.

A chart subset is a closed box of chart coordinates: a slit of width w is
cut around the seam of every periodic axis, singular bands are cut from
the faces of the others, and the remaining box is shrunk about its centre
by a factor r in (0, 1]. The box is diffeomorphic to a closed ball, and its
complement has Riemannian measure below a requested delta. Boxes are
mapped affinely onto [-1, 1]^d, which gives an explicit diffeomorphism
between any two subsets of equal dimension.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import InvalidParameterError, PrecisionError, ShapeError
from manifoldlab.manifolds import (
    EmbeddedManifold,
    embed_points,
    sample_in_box,
    total_volume,
    volume,
)
from manifoldlab.manifolds.sampling import SeedLike

logger = logging.getLogger(__name__)

DEFAULT_SLIT_WIDTH = 1e-3
DEFAULT_RESOLUTION = 256
DEFICIT_TARGET = 0.95
BISECTION_STEPS = 60
COLLAPSE_WARNING = 1e-3


@dataclass(frozen=True)
class ChartSubset:
    """
    Closed chart box M_delta with small complement.

    Attributes
    ----------
    manifold : EmbeddedManifold
        Ambient manifold.
    lower, upper : NDArray[np.float64]
        Corners of the kept box.
    excluded_lower, excluded_upper : NDArray[np.float64]
        Corners of the box left after cutting slits and bands, before
        shrinking; the excluded region is the chart box minus this one,
        plus the shrink margin.
    radius_param : float
        Shrink factor r in (0, 1].
    measure_deficit : float
        Riemannian measure of M minus the kept box.
    total_measure : float
        Riemannian measure of M.
    delta : float
        Requested bound on the deficit.
    resolution : int
        Quadrature nodes per axis used for the measures.
    """

    manifold: EmbeddedManifold
    lower: NDArray[np.float64] = field(repr=False)
    upper: NDArray[np.float64] = field(repr=False)
    excluded_lower: NDArray[np.float64] = field(repr=False)
    excluded_upper: NDArray[np.float64] = field(repr=False)
    radius_param: float
    measure_deficit: float
    total_measure: float
    delta: float
    resolution: int = DEFAULT_RESOLUTION

    @property
    def dim(self) -> int:
        return self.manifold.intrinsic_dim

    @property
    def kept_measure(self) -> float:
        return self.total_measure - self.measure_deficit

    def normalize(self, chart_points: ArrayLike) -> NDArray[np.float64]:
        """Affine map of the kept box onto [-1, 1]^d."""
        p = np.asarray(chart_points, dtype=np.float64)
        return 2.0 * (p - self.lower) / (self.upper - self.lower) - 1.0

    def denormalize(self, unit_points: ArrayLike) -> NDArray[np.float64]:
        """Inverse of :meth:`normalize`."""
        u = np.asarray(unit_points, dtype=np.float64)
        return self.lower + (u + 1.0) * (self.upper - self.lower) / 2.0

    def contains(self, chart_points: ArrayLike, atol: float = 1e-12) -> NDArray[np.bool_]:
        """Whether each chart point lies in the kept box."""
        p = np.atleast_2d(np.asarray(chart_points, dtype=np.float64))
        return np.all((p >= self.lower - atol) & (p <= self.upper + atol), axis=1)

    def sample(self, count: int, seed: SeedLike = None) -> NDArray[np.float64]:
        """Riemannian-uniform chart points of the kept box."""
        return sample_in_box(self.manifold, self.lower, self.upper, count, seed)

    def sample_ambient(self, count: int, seed: SeedLike = None) -> NDArray[np.float64]:
        """Ambient points of a uniform sample of the subset."""
        return embed_points(self.manifold, self.sample(count, seed), validate=False)

    def recompute_deficit(self, resolution: int) -> float:
        """Deficit recomputed by quadrature at another resolution."""
        total = total_volume(self.manifold, resolution)
        return total - volume(self.manifold, self.lower, self.upper, resolution)


def _cut_box(
    manifold: EmbeddedManifold, slit_width: float
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    lower = manifold.lower.copy()
    upper = manifold.upper.copy()
    for axis, periodic in enumerate(manifold.periodic):
        if periodic:
            lower[axis] += slit_width / 2.0
            upper[axis] -= slit_width / 2.0
    for axis, value in manifold.singular_coords:
        band = max(manifold.singular_margin, slit_width / 2.0)
        if abs(value - lower[axis]) <= band:
            lower[axis] = value + band
        if abs(value - upper[axis]) <= band:
            upper[axis] = value - band
    if np.any(upper <= lower):
        raise InvalidParameterError(f"slit width {slit_width} removes the whole chart")
    return lower, upper


def _shrink(
    lower: NDArray[np.float64], upper: NDArray[np.float64], r: float
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    center = (lower + upper) / 2.0
    half = r * (upper - lower) / 2.0
    return center - half, center + half


def build_chart_subset(
    manifold: EmbeddedManifold,
    delta: float,
    slit_width: float = DEFAULT_SLIT_WIDTH,
    radius_param: Optional[float] = None,
    resolution: int = DEFAULT_RESOLUTION,
) -> ChartSubset:
    """
    Build a closed chart box whose complement has measure below ``delta``.

    Without ``radius_param`` the shrink factor is bisected to the smallest r
    whose deficit is at most 0.95 * delta.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Manifold with a chart inverse.
    delta : float
        Deficit bound, 0 < delta < volume(M).
    slit_width : float, optional
        Chart width removed around each periodic seam.
    radius_param : float, optional
        Fixed shrink factor in (0, 1]; the deficit is still checked.
    resolution : int, optional
        Quadrature nodes per axis.

    Returns
    -------
    ChartSubset

    Raises
    ------
    InvalidParameterError
        If ``delta`` or ``radius_param`` is out of range.
    PrecisionError
        If the slits alone, or the quadrature error, already exceed delta.

    Examples
    --------
    >>> import math
    >>> from manifoldlab.manifolds import get_manifold
    >>> s = build_chart_subset(get_manifold("circle"), 0.1 * 2 * math.pi)
    >>> s.kept_measure >= 0.9 * 2 * math.pi
    True
    """
    if slit_width <= 0:
        raise InvalidParameterError(f"slit_width must be positive, got {slit_width}")
    total = total_volume(manifold, resolution)
    if not 0 < delta < total:
        raise InvalidParameterError(
            f"delta must be in (0, {total:.6g}) for {manifold.name}, got {delta}"
        )
    quadrature_error = abs(total_volume(manifold, 2 * resolution) - total)
    if delta <= 10.0 * quadrature_error:
        raise PrecisionError(
            f"delta {delta:.3g} is below the quadrature resolution "
            f"(error estimate {quadrature_error:.3g})"
        )
    cut_lower, cut_upper = _cut_box(manifold, slit_width)

    def deficit(r: float) -> float:
        lo, hi = _shrink(cut_lower, cut_upper, r)
        return total - volume(manifold, lo, hi, resolution)

    target = DEFICIT_TARGET * delta
    if radius_param is None:
        if deficit(1.0) > target:
            raise PrecisionError(
                f"slits of width {slit_width} already remove {deficit(1.0):.3g} "
                f">= {target:.3g} of {manifold.name}"
            )
        lo_r, hi_r = 0.0, 1.0
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo_r + hi_r)
            if deficit(mid) <= target:
                hi_r = mid
            else:
                lo_r = mid
        r = hi_r
    else:
        if not 0 < radius_param <= 1:
            raise InvalidParameterError(
                f"radius_param must be in (0, 1], got {radius_param}"
            )
        r = float(radius_param)

    lower, upper = _shrink(cut_lower, cut_upper, r)
    measured = deficit(r)
    if measured >= delta:
        raise PrecisionError(
            f"chart subset with r={r:.6g} misses {measured:.6g} >= delta={delta:.6g}"
        )
    if r < COLLAPSE_WARNING:
        warnings.warn(
            f"chart subset of {manifold.name} collapsed to r={r:.3g}",
            UserWarning,
            stacklevel=2,
        )
    logger.debug(
        "chart subset of %s: r=%.6g, deficit %.6g < delta %.6g", manifold.name, r, measured, delta
    )
    return ChartSubset(
        manifold=manifold,
        lower=lower,
        upper=upper,
        excluded_lower=cut_lower,
        excluded_upper=cut_upper,
        radius_param=r,
        measure_deficit=measured,
        total_measure=total,
        delta=float(delta),
        resolution=resolution,
    )


def build_matched_subsets(
    source: EmbeddedManifold,
    target: EmbeddedManifold,
    delta: float,
    slit_width: float = DEFAULT_SLIT_WIDTH,
    resolution: int = DEFAULT_RESOLUTION,
) -> tuple[ChartSubset, ChartSubset]:
    """
    Subsets of both manifolds sharing one shrink factor.

    The larger of the two bisected factors is used for both, so both
    deficits stay below ``delta``.
    """
    if source.intrinsic_dim != target.intrinsic_dim:
        raise ShapeError(
            f"manifolds must have equal dimension, got {source.intrinsic_dim} "
            f"and {target.intrinsic_dim}"
        )
    first = build_chart_subset(source, delta, slit_width, resolution=resolution)
    second = build_chart_subset(target, delta, slit_width, resolution=resolution)
    r = max(first.radius_param, second.radius_param)
    return (
        build_chart_subset(source, delta, slit_width, r, resolution),
        build_chart_subset(target, delta, slit_width, r, resolution),
    )


AmbientMap = Callable[[NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True)
class GroundTruthDiffeo:
    """
    Explicit diffeomorphism between two chart subsets and its inverse.

    ``forward = embed_dst o denormalize_dst o normalize_src o chart_src^-1``
    on ambient points of the source subset; ``inverse`` mirrors it.
    """

    source: ChartSubset
    target: ChartSubset

    def _transfer(self, a: ChartSubset, b: ChartSubset, x: ArrayLike) -> NDArray[np.float64]:
        if a.manifold.chart_inverse is None:
            raise InvalidParameterError(f"{a.manifold.name} has no chart inverse")
        pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
        chart = np.asarray(a.manifold.chart_inverse(pts), dtype=np.float64)
        mapped = b.denormalize(a.normalize(chart))
        return embed_points(b.manifold, mapped, validate=False)

    def forward(self, x: ArrayLike) -> NDArray[np.float64]:
        """f: source ambient points -> target ambient points."""
        return self._transfer(self.source, self.target, x)

    def inverse(self, y: ArrayLike) -> NDArray[np.float64]:
        """g = f^-1: target ambient points -> source ambient points."""
        return self._transfer(self.target, self.source, y)


def ground_truth_diffeo(source: ChartSubset, target: ChartSubset) -> GroundTruthDiffeo:
    """
    Diffeomorphism between chart subsets of equal dimension.

    Raises
    ------
    InvalidParameterError
        If the intrinsic dimensions differ.

    Examples
    --------
    >>> import math
    >>> from manifoldlab.manifolds import circle
    >>> a = build_chart_subset(circle(), 0.1, radius_param=1.0)
    >>> b = build_chart_subset(circle(2.0), 0.1, radius_param=1.0)
    >>> diffeo = ground_truth_diffeo(a, b)
    >>> diffeo.forward([[0.0, 1.0]]).round(12)
    array([[0., 2.]])
    """
    if source.dim != target.dim:
        raise InvalidParameterError(
            f"chart subsets must have equal dimension, got {source.dim} and {target.dim}"
        )
    return GroundTruthDiffeo(source=source, target=target)
