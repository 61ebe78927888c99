"""Embedded Riemannian manifolds described by a single chart.

A manifold is a box-shaped chart domain in parameter space together with a
smooth embedding into ambient Euclidean space. The Riemannian structure is
the pullback of the ambient Euclidean metric. Built-in manifolds may attach
closed-form oracles (Jacobian, metric, Christoffel symbols, exponential map,
diameter) which the numerical pipeline is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import ChartDomainError, InvalidParameterError

ChartMap = Callable[[NDArray[np.float64]], NDArray[np.float64]]
ExpMap = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]]

DEFAULT_SINGULAR_MARGIN = 1e-2


@dataclass(frozen=True)
class EmbeddedManifold:
    """
    Compact manifold given by one chart and an embedding into R^n.

    All callables are vectorised over leading axes: ``embedding`` maps an
    array of shape ``(..., d)`` to ``(..., n)``.

    Parameters
    ----------
    name : str
        Identifier used in reports.
    intrinsic_dim : int
        Manifold dimension d.
    ambient_dim : int
        Ambient dimension n (n >= d).
    chart_lower, chart_upper : tuple of float
        Axis-aligned chart box. Periodic axes are half-open ``[lower, upper)``.
    embedding : callable
        Chart coordinates -> ambient coordinates.
    periodic : tuple of bool
        Which chart axes are periodic. Periodic coordinates are wrapped by
        the caller; the embedding accepts any finite value on them.
    singular_coords : tuple of (int, float)
        ``(axis, value)`` pairs where the chart degenerates (e.g. sphere poles).
    singular_margin : float
        Half-width of the band excluded around each singular coordinate.
    analytic_jacobian, analytic_metric, analytic_christoffel : callable, optional
        Closed-form derivative oracles. Shapes ``(..., n, d)``, ``(..., d, d)``
        and ``(..., d, d, d)`` with Christoffel index order ``[k, i, j]``.
    analytic_exp : callable, optional
        ``(q, v) -> ambient point`` closed-form exponential map.
    analytic_diameter : float, optional
        Riemannian diameter when known in closed form.
    chart_inverse : callable, optional
        Ambient point -> chart coordinates (inverse of the embedding).
    area_sampler : callable, optional
        Maps unit-cube points ``(N, d)`` to chart points distributed
        uniformly with respect to the Riemannian measure, restricted to the
        chart domain outside the singular bands.
    base_point : tuple of float, optional
        Default base point for generator construction.
    """

    name: str
    intrinsic_dim: int
    ambient_dim: int
    chart_lower: tuple[float, ...]
    chart_upper: tuple[float, ...]
    embedding: ChartMap
    periodic: tuple[bool, ...]
    singular_coords: tuple[tuple[int, float], ...] = ()
    singular_margin: float = 0.0
    analytic_jacobian: Optional[ChartMap] = field(default=None, repr=False)
    analytic_metric: Optional[ChartMap] = field(default=None, repr=False)
    analytic_christoffel: Optional[ChartMap] = field(default=None, repr=False)
    analytic_exp: Optional[ExpMap] = field(default=None, repr=False)
    analytic_diameter: Optional[float] = None
    chart_inverse: Optional[ChartMap] = field(default=None, repr=False)
    area_sampler: Optional[ChartMap] = field(default=None, repr=False)
    base_point: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        d = self.intrinsic_dim
        if d < 1:
            raise InvalidParameterError(f"intrinsic_dim must be positive, got {d}")
        if self.ambient_dim < d:
            raise InvalidParameterError(
                f"ambient_dim must be >= intrinsic_dim ({d}), got {self.ambient_dim}"
            )
        for label, values in (
            ("chart_lower", self.chart_lower),
            ("chart_upper", self.chart_upper),
            ("periodic", self.periodic),
        ):
            if len(values) != d:
                raise InvalidParameterError(
                    f"{label} must have length {d}, got {len(values)}"
                )
        if any(lo > hi for lo, hi in zip(self.chart_lower, self.chart_upper)):
            raise InvalidParameterError("chart_lower must not exceed chart_upper")
        if self.singular_margin < 0:
            raise InvalidParameterError(
                f"singular_margin must be nonnegative, got {self.singular_margin}"
            )

    @property
    def lower(self) -> NDArray[np.float64]:
        """Chart box lower corner."""
        return np.asarray(self.chart_lower, dtype=np.float64)

    @property
    def upper(self) -> NDArray[np.float64]:
        """Chart box upper corner."""
        return np.asarray(self.chart_upper, dtype=np.float64)

    @property
    def periods(self) -> NDArray[np.float64]:
        """Period of each axis (0 for non-periodic axes)."""
        widths = self.upper - self.lower
        return np.where(np.asarray(self.periodic), widths, 0.0)

    def wrap(self, points: ArrayLike) -> NDArray[np.float64]:
        """Wrap periodic coordinates into ``[lower, upper)``."""
        p = np.array(points, dtype=np.float64)
        for axis, is_periodic in enumerate(self.periodic):
            if is_periodic:
                lo = self.chart_lower[axis]
                width = self.chart_upper[axis] - lo
                p[..., axis] = lo + np.mod(p[..., axis] - lo, width)
        return p

    def in_singular_band(self, points: ArrayLike) -> NDArray[np.bool_]:
        """Boolean mask of points lying in an excluded singular band."""
        p = np.asarray(points, dtype=np.float64)
        mask = np.zeros(p.shape[:-1], dtype=bool)
        for axis, value in self.singular_coords:
            mask |= np.abs(p[..., axis] - value) < self.singular_margin
        return mask

    def validate_point(
        self, point: ArrayLike, margin: float | NDArray[np.float64] = 0.0
    ) -> NDArray[np.float64]:
        """
        Check that a chart point lies in the chart domain.

        Parameters
        ----------
        point : array_like
            Chart coordinates, shape ``(d,)``.
        margin : float or NDArray, optional
            Required distance from the box faces on non-periodic axes.

        Returns
        -------
        NDArray[np.float64]
            The point as a float array.

        Raises
        ------
        ChartDomainError
            If the point is outside the box (less the margin) or inside a
            singular band. The offending coordinate index is attached.
        """
        p = np.asarray(point, dtype=np.float64)
        if p.shape != (self.intrinsic_dim,):
            raise ChartDomainError(
                f"chart point must have shape ({self.intrinsic_dim},), got {p.shape}"
            )
        margins = np.broadcast_to(np.asarray(margin, dtype=np.float64), p.shape)
        for axis in range(self.intrinsic_dim):
            value = p[axis]
            if not np.isfinite(value):
                raise ChartDomainError(
                    f"coordinate {axis} is not finite: {value}", coordinate=axis
                )
            if self.periodic[axis]:
                continue
            lo = self.chart_lower[axis] + margins[axis]
            hi = self.chart_upper[axis] - margins[axis]
            if value < lo or value > hi:
                raise ChartDomainError(
                    f"coordinate {axis} = {value:.6g} outside chart domain "
                    f"[{lo:.6g}, {hi:.6g}] of {self.name}",
                    coordinate=axis,
                )
        for axis, singular in self.singular_coords:
            if abs(p[axis] - singular) < self.singular_margin + margins[axis]:
                raise ChartDomainError(
                    f"coordinate {axis} = {p[axis]:.6g} inside singular band "
                    f"around {singular:.6g} of {self.name}",
                    coordinate=axis,
                )
        return p

    def validate_points(self, points: ArrayLike) -> NDArray[np.float64]:
        """
        Vectorised domain check for an ``(N, d)`` batch of chart points.

        Raises
        ------
        ChartDomainError
            Naming the first offending coordinate of the first bad row.
        """
        p = np.asarray(points, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != self.intrinsic_dim:
            raise ChartDomainError(
                f"chart points must have shape (N, {self.intrinsic_dim}), got {p.shape}"
            )
        bad = ~np.isfinite(p)
        fixed = ~np.asarray(self.periodic)
        bad |= fixed & ((p < self.lower) | (p > self.upper))
        for axis, singular in self.singular_coords:
            bad[:, axis] |= np.abs(p[:, axis] - singular) < self.singular_margin
        if np.any(bad):
            row, axis = np.argwhere(bad)[0]
            self.validate_point(p[row])
            raise ChartDomainError(
                f"coordinate {axis} of point {row} outside chart domain",
                coordinate=int(axis),
            )
        return p


@dataclass(frozen=True)
class TangentVector:
    """
    Tangent vector in chart components.

    Attributes
    ----------
    base : NDArray[np.float64]
        Base point (chart coordinates).
    components : NDArray[np.float64]
        Components in the coordinate basis.
    """

    base: NDArray[np.float64]
    components: NDArray[np.float64]

    def __post_init__(self) -> None:
        base = np.asarray(self.base, dtype=np.float64)
        components = np.asarray(self.components, dtype=np.float64)
        if base.shape != components.shape:
            raise InvalidParameterError(
                f"base and components must share shape, got {base.shape} "
                f"and {components.shape}"
            )
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "components", components)


@dataclass(frozen=True)
class MetricTensor:
    """
    Riemannian metric at a point, g = J^T J.

    Attributes
    ----------
    matrix : NDArray[np.float64]
        Symmetric positive definite d x d matrix.
    """

    matrix: NDArray[np.float64]

    @property
    def determinant(self) -> float:
        """det g."""
        return float(np.linalg.det(self.matrix))

    @property
    def volume_density(self) -> float:
        """Riemannian volume density sqrt(det g)."""
        return float(np.sqrt(max(self.determinant, 0.0)))

    def norm(self, vector: ArrayLike) -> float:
        """Metric norm sqrt(v^T g v)."""
        v = np.asarray(vector, dtype=np.float64)
        return float(np.sqrt(max(v @ self.matrix @ v, 0.0)))

    def is_symmetric(self, atol: float = 1e-12) -> bool:
        """Symmetry within an absolute tolerance."""
        return bool(np.max(np.abs(self.matrix - self.matrix.T)) <= atol)

    def is_positive_definite(self) -> bool:
        """Positive definiteness via Cholesky pivots."""
        try:
            np.linalg.cholesky(self.matrix)
        except np.linalg.LinAlgError:
            return False
        return True


@dataclass(frozen=True)
class ChristoffelSymbols:
    """
    Christoffel symbols of the second kind.

    Attributes
    ----------
    gamma : NDArray[np.float64]
        Array of shape (d, d, d) indexed ``gamma[k, i, j]`` = Gamma^k_{ij}.
    """

    gamma: NDArray[np.float64]

    def lower_index_asymmetry(self) -> float:
        """Max |Gamma^k_ij - Gamma^k_ji|."""
        return float(np.max(np.abs(self.gamma - np.swapaxes(self.gamma, 1, 2))))

    def contract(self, velocity: ArrayLike) -> NDArray[np.float64]:
        """Gamma^k_ij v^i v^j."""
        v = np.asarray(velocity, dtype=np.float64)
        return np.einsum("kij,i,j->k", self.gamma, v, v)
