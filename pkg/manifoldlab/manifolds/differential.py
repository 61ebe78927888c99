"""Pullback metric, Christoffel symbols and Riemannian volume.

Derivatives use fixed central-difference steps so every run is
reproducible: a relative step of 1e-5 for the embedding Jacobian and 1e-4
for metric derivatives. A step is relative to ``max(1, |coordinate|)``.
"""

from __future__ import annotations

import logging
import warnings
from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import (
    ChartDomainError,
    InvalidParameterError,
    SingularityError,
)
from manifoldlab.manifolds.core import (
    ChristoffelSymbols,
    EmbeddedManifold,
    MetricTensor,
)

logger = logging.getLogger(__name__)

FIRST_ORDER_STEP = 1e-5
SECOND_ORDER_STEP = 1e-4
PIVOT_TOLERANCE = 1e-12
_CHUNK = 1 << 16
GAUSS_ORDER = 8


def _relative_steps(points: NDArray[np.float64], step: float) -> NDArray[np.float64]:
    return step * np.maximum(1.0, np.abs(points))


def embed(manifold: EmbeddedManifold, p: ArrayLike) -> NDArray[np.float64]:
    """
    Map a chart point to ambient space.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Target manifold.
    p : array_like
        Chart coordinates, shape ``(d,)``.

    Returns
    -------
    NDArray[np.float64]
        Ambient point, shape ``(n,)``.

    Raises
    ------
    ChartDomainError
        If ``p`` is outside the chart domain.

    Examples
    --------
    >>> from manifoldlab.manifolds import get_manifold
    >>> embed(get_manifold("circle"), [0.0])
    array([1., 0.])
    """
    point = manifold.validate_point(p)
    return np.asarray(manifold.embedding(point), dtype=np.float64)


def embed_points(
    manifold: EmbeddedManifold, points: ArrayLike, validate: bool = True
) -> NDArray[np.float64]:
    """Embed an ``(N, d)`` batch of chart points, returning ``(N, n)``."""
    p = np.asarray(points, dtype=np.float64)
    if validate:
        p = manifold.validate_points(p)
    return np.asarray(manifold.embedding(p), dtype=np.float64)


def jacobian_points(
    manifold: EmbeddedManifold, points: NDArray[np.float64]
) -> NDArray[np.float64]:
    """
    Embedding Jacobians for a batch, shape ``(N, n, d)``.

    Uses the analytic Jacobian when the manifold provides one, otherwise
    central differences. No domain validation is performed.
    """
    p = np.asarray(points, dtype=np.float64)
    if manifold.analytic_jacobian is not None:
        return np.asarray(manifold.analytic_jacobian(p), dtype=np.float64)
    h = _relative_steps(p, FIRST_ORDER_STEP)
    columns = []
    for j in range(manifold.intrinsic_dim):
        forward = p.copy()
        backward = p.copy()
        forward[..., j] += h[..., j]
        backward[..., j] -= h[..., j]
        diff = manifold.embedding(forward) - manifold.embedding(backward)
        columns.append(diff / (2.0 * h[..., j, None]))
    return np.stack(columns, axis=-1)


def metric_points(
    manifold: EmbeddedManifold, points: NDArray[np.float64]
) -> NDArray[np.float64]:
    """Pullback metrics J^T J for a batch, shape ``(N, d, d)``."""
    jac = jacobian_points(manifold, points)
    g = np.einsum("...ai,...aj->...ij", jac, jac)
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def check_metric(g: NDArray[np.float64]) -> None:
    """Raise SingularityError unless every metric in the batch is positive definite."""
    try:
        chol = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("metric is not positive definite") from exc
    pivots = np.diagonal(chol, axis1=-2, axis2=-1) ** 2
    scale = np.max(np.abs(np.diagonal(g, axis1=-2, axis2=-1)), axis=-1, keepdims=True)
    ratio = pivots / np.maximum(scale, np.finfo(np.float64).tiny)
    if np.any(ratio < PIVOT_TOLERANCE):
        raise SingularityError(
            f"metric pivot below tolerance: min relative pivot {np.min(ratio):.3e}"
        )


def christoffel_points(
    manifold: EmbeddedManifold,
    points: NDArray[np.float64],
    prefer_analytic: bool = True,
) -> NDArray[np.float64]:
    """
    Christoffel symbols for a batch, shape ``(N, d, d, d)``.

    With ``prefer_analytic`` the manifold's closed form is used when present.
    Otherwise the metric is differentiated by central differences.

    Raises
    ------
    SingularityError
        If a metric pivot falls below tolerance.
    """
    p = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if prefer_analytic and manifold.analytic_christoffel is not None:
        return np.asarray(manifold.analytic_christoffel(p), dtype=np.float64)

    n_points, d = p.shape
    g = metric_points(manifold, p)
    check_metric(g)
    h = _relative_steps(p, SECOND_ORDER_STEP)
    # dg[n, a, b, c] = d_a g_bc
    dg = np.empty((n_points, d, d, d))
    for axis in range(d):
        forward = p.copy()
        backward = p.copy()
        forward[:, axis] += h[:, axis]
        backward[:, axis] -= h[:, axis]
        dg[:, axis] = (
            metric_points(manifold, forward) - metric_points(manifold, backward)
        ) / (2.0 * h[:, axis, None, None])

    first_kind = 0.5 * (
        np.einsum("nijl->nlij", dg) + np.einsum("njil->nlij", dg) - dg
    )
    gamma = np.linalg.solve(g, first_kind.reshape(n_points, d, d * d))
    return gamma.reshape(n_points, d, d, d)


def embedding_jacobian(manifold: EmbeddedManifold, p: ArrayLike) -> NDArray[np.float64]:
    """
    Embedding Jacobian at a chart point.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Target manifold.
    p : array_like
        Chart point, interior by at least the difference step on
        non-periodic axes.

    Returns
    -------
    NDArray[np.float64]
        Matrix of shape ``(n, d)``; column j is d(embedding)/d(coord_j).

    Raises
    ------
    ChartDomainError
        If the point lacks the interior margin.
    """
    point = np.asarray(p, dtype=np.float64)
    margin = 0.0
    if manifold.analytic_jacobian is None:
        margin = _relative_steps(point, FIRST_ORDER_STEP)
    point = manifold.validate_point(point, margin=margin)
    return jacobian_points(manifold, point[None, :])[0]


def metric(manifold: EmbeddedManifold, p: ArrayLike) -> MetricTensor:
    """
    Pullback metric g = J^T J at a chart point.

    Examples
    --------
    >>> from manifoldlab.manifolds import get_manifold
    >>> metric(get_manifold("circle"), [0.0]).matrix
    array([[1.]])
    """
    jac = embedding_jacobian(manifold, p)
    g = jac.T @ jac
    return MetricTensor(matrix=0.5 * (g + g.T))


def christoffel(manifold: EmbeddedManifold, p: ArrayLike) -> ChristoffelSymbols:
    """
    Christoffel symbols of the second kind at a chart point.

    Always runs the finite-difference pipeline so the result can be
    compared against a manifold's closed-form oracle.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Target manifold.
    p : array_like
        Chart point with interior margin for second-order differences.

    Returns
    -------
    ChristoffelSymbols
        ``gamma[k, i, j]`` = Gamma^k_{ij}.

    Raises
    ------
    ChartDomainError
        If the point lacks the interior margin.
    SingularityError
        If the metric is degenerate at the point.
    """
    point = np.asarray(p, dtype=np.float64)
    margin = _relative_steps(point, SECOND_ORDER_STEP)
    if manifold.analytic_jacobian is None:
        margin = margin + _relative_steps(point, FIRST_ORDER_STEP)
    point = manifold.validate_point(point, margin=margin)
    gamma = christoffel_points(manifold, point[None, :], prefer_analytic=False)[0]
    return ChristoffelSymbols(gamma=gamma)


def volume_density(
    manifold: EmbeddedManifold, points: NDArray[np.float64]
) -> NDArray[np.float64]:
    """Riemannian density sqrt(det g) for a batch of chart points."""
    p = np.asarray(points, dtype=np.float64)
    out = np.empty(p.shape[0])
    for start in range(0, p.shape[0], _CHUNK):
        chunk = p[start : start + _CHUNK]
        det = np.linalg.det(metric_points(manifold, chunk))
        out[start : start + _CHUNK] = np.sqrt(np.maximum(det, 0.0))
    return out


def _axis_rule(
    lo: float, hi: float, count: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Composite Gauss-Legendre nodes and weights with at least ``count`` nodes."""
    order = min(GAUSS_ORDER, count)
    panels = int(np.ceil(count / order))
    nodes, weights = np.polynomial.legendre.leggauss(order)
    width = (hi - lo) / panels
    left = lo + width * np.arange(panels)
    x = left[:, None] + 0.5 * width * (nodes[None, :] + 1.0)
    w = np.broadcast_to(0.5 * width * weights, x.shape)
    return x.ravel(), w.ravel()


def _tensor_rule(
    lower: NDArray[np.float64],
    upper: NDArray[np.float64],
    counts: Sequence[int],
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    rules = [_axis_rule(lo, hi, count) for lo, hi, count in zip(lower, upper, counts)]
    mesh = np.meshgrid(*(x for x, _ in rules), indexing="ij")
    weight_mesh = np.meshgrid(*(w for _, w in rules), indexing="ij")
    weights = np.prod(np.stack([w.ravel() for w in weight_mesh], axis=-1), axis=-1)
    return np.stack([m.ravel() for m in mesh], axis=-1), weights


def volume(
    manifold: EmbeddedManifold,
    lower: ArrayLike,
    upper: ArrayLike,
    resolution: Union[int, Sequence[int]] = 256,
) -> float:
    """
    Riemannian measure of a chart box by composite Gauss-Legendre quadrature.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Target manifold.
    lower, upper : array_like
        Corners of the region, each of shape ``(d,)``. A region with
        ``upper == lower`` on any axis is empty.
    resolution : int or sequence of int, optional
        Quadrature nodes per axis, by default 256. Each axis is cut into
        panels carrying eight Gauss-Legendre nodes, so the node count is
        rounded up to a multiple of eight.

    Returns
    -------
    float
        Approximation of the measure, converging as resolution grows.

    Raises
    ------
    ChartDomainError
        If the region escapes the chart box.
    InvalidParameterError
        If ``upper < lower`` on some axis or a resolution is not positive.

    Examples
    --------
    >>> from manifoldlab.manifolds import get_manifold
    >>> import math
    >>> round(volume(get_manifold("circle"), [0.0], [2 * math.pi], 10_000), 6)
    6.283185
    """
    d = manifold.intrinsic_dim
    lo = np.asarray(lower, dtype=np.float64).reshape(-1)
    hi = np.asarray(upper, dtype=np.float64).reshape(-1)
    if lo.shape != (d,) or hi.shape != (d,):
        raise InvalidParameterError(f"region corners must have shape ({d},)")
    if np.any(hi < lo):
        raise InvalidParameterError("region upper corner must not be below lower")

    tol = 1e-12 * np.maximum(1.0, np.abs(manifold.upper - manifold.lower))
    outside = (lo < manifold.lower - tol) | (hi > manifold.upper + tol)
    if np.any(outside):
        axis = int(np.argmax(outside))
        raise ChartDomainError(
            f"region escapes chart domain of {manifold.name} on coordinate {axis}: "
            f"[{lo[axis]:.6g}, {hi[axis]:.6g}]",
            coordinate=axis,
        )

    counts = [resolution] * d if isinstance(resolution, int) else list(resolution)
    if len(counts) != d or any(int(c) < 1 for c in counts):
        raise InvalidParameterError(
            f"resolution must be a positive int or {d} positive ints, got {resolution}"
        )
    if np.any(hi == lo):
        return 0.0
    if min(counts) < 8:
        warnings.warn(
            f"Quadrature resolution {min(counts)} is very coarse",
            UserWarning,
            stacklevel=2,
        )

    points, weights = _tensor_rule(lo, hi, [int(c) for c in counts])
    total = float(np.dot(volume_density(manifold, points), weights))
    logger.debug(
        "volume of %s over %s..%s at %s: %.12g", manifold.name, lo, hi, counts, total
    )
    return total


def total_volume(
    manifold: EmbeddedManifold, resolution: Union[int, Sequence[int]] = 256
) -> float:
    """Riemannian measure of the whole chart box."""
    return volume(manifold, manifold.lower, manifold.upper, resolution)
