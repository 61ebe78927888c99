"""Built-in compact manifolds with closed-form oracles.

Each entry supplies at least one nontrivial quantity in closed form so the
numerical pipeline has something to be checked against:

- ``circle``: S^1 in R^2, angle chart.
- ``sphere``: S^2 in R^3, polar/azimuthal chart with pole bands excluded.
- ``clifford-torus``: T^2 in R^4, flat (g = I).
- ``torus3``: doughnut torus in R^3 with radii R = 2, r = 0.5.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import InvalidParameterError
from manifoldlab.manifolds.core import DEFAULT_SINGULAR_MARGIN, EmbeddedManifold

TWO_PI = 2.0 * math.pi


def _center(center: Optional[ArrayLike], dim: int) -> NDArray[np.float64]:
    if center is None:
        return np.zeros(dim)
    c = np.asarray(center, dtype=np.float64)
    if c.shape != (dim,):
        raise InvalidParameterError(f"center must have length {dim}, got {c.shape}")
    return c


def _positive(name: str, value: float) -> float:
    if value <= 0:
        raise InvalidParameterError(f"{name} must be positive, got {value}")
    return float(value)


def circle(radius: float = 1.0, center: Optional[ArrayLike] = None) -> EmbeddedManifold:
    """
    Circle of given radius in R^2, chart theta in [0, 2pi).

    Examples
    --------
    >>> circle().analytic_diameter == math.pi
    True
    """
    r = _positive("radius", radius)
    c = _center(center, 2)

    def embedding(p: NDArray[np.float64]) -> NDArray[np.float64]:
        t = p[..., 0]
        return np.stack([c[0] + r * np.cos(t), c[1] + r * np.sin(t)], axis=-1)

    def jacobian(p: NDArray[np.float64]) -> NDArray[np.float64]:
        t = p[..., 0]
        return np.stack([-r * np.sin(t), r * np.cos(t)], axis=-1)[..., None]

    def metric(p: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.full(p.shape[:-1] + (1, 1), r * r)

    def christoffel(p: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.zeros(p.shape[:-1] + (1, 1, 1))

    def exp(q: NDArray[np.float64], v: NDArray[np.float64]) -> NDArray[np.float64]:
        return embedding(np.asarray(q) + np.asarray(v))

    def inverse(x: NDArray[np.float64]) -> NDArray[np.float64]:
        y = np.asarray(x, dtype=np.float64) - c
        return np.mod(np.arctan2(y[..., 1], y[..., 0]), TWO_PI)[..., None]

    def sampler(u: NDArray[np.float64]) -> NDArray[np.float64]:
        return TWO_PI * np.asarray(u)

    return EmbeddedManifold(
        name="circle" if r == 1.0 else f"circle(r={r:g})",
        intrinsic_dim=1,
        ambient_dim=2,
        chart_lower=(0.0,),
        chart_upper=(TWO_PI,),
        embedding=embedding,
        periodic=(True,),
        analytic_jacobian=jacobian,
        analytic_metric=metric,
        analytic_christoffel=christoffel,
        analytic_exp=exp,
        analytic_diameter=math.pi * r,
        chart_inverse=inverse,
        area_sampler=sampler,
        base_point=(0.0,),
    )


def sphere(
    radius: float = 1.0,
    center: Optional[ArrayLike] = None,
    singular_margin: float = DEFAULT_SINGULAR_MARGIN,
) -> EmbeddedManifold:
    """
    Round sphere in R^3, chart (theta, phi) in [0, pi] x [0, 2pi).

    The poles theta = 0 and theta = pi are excluded by a band of width
    ``singular_margin``.
    """
    r = _positive("radius", radius)
    c = _center(center, 3)
    margin = float(singular_margin)

    def embedding(p: NDArray[np.float64]) -> NDArray[np.float64]:
        theta, phi = p[..., 0], p[..., 1]
        st = np.sin(theta)
        return c + r * np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], -1)

    def jacobian(p: NDArray[np.float64]) -> NDArray[np.float64]:
        theta, phi = p[..., 0], p[..., 1]
        st, ct = np.sin(theta), np.cos(theta)
        sp, cp = np.sin(phi), np.cos(phi)
        d_theta = np.stack([ct * cp, ct * sp, -st], axis=-1)
        d_phi = np.stack([-st * sp, st * cp, np.zeros_like(st)], axis=-1)
        return r * np.stack([d_theta, d_phi], axis=-1)

    def metric(p: NDArray[np.float64]) -> NDArray[np.float64]:
        st = np.sin(p[..., 0])
        g = np.zeros(p.shape[:-1] + (2, 2))
        g[..., 0, 0] = r * r
        g[..., 1, 1] = (r * st) ** 2
        return g

    def christoffel(p: NDArray[np.float64]) -> NDArray[np.float64]:
        theta = p[..., 0]
        st, ct = np.sin(theta), np.cos(theta)
        gamma = np.zeros(p.shape[:-1] + (2, 2, 2))
        gamma[..., 0, 1, 1] = -st * ct
        gamma[..., 1, 0, 1] = ct / st
        gamma[..., 1, 1, 0] = ct / st
        return gamma

    def exp(q: NDArray[np.float64], v: NDArray[np.float64]) -> NDArray[np.float64]:
        q = np.asarray(q, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        base = (embedding(q) - c) / r
        tangent = np.einsum("...ai,...i->...a", jacobian(q), v) / r
        angle = np.linalg.norm(tangent, axis=-1, keepdims=True)
        sinc = np.sinc(angle / math.pi)
        return c + r * (np.cos(angle) * base + sinc * tangent)

    def inverse(x: NDArray[np.float64]) -> NDArray[np.float64]:
        y = (np.asarray(x, dtype=np.float64) - c) / r
        theta = np.arccos(np.clip(y[..., 2], -1.0, 1.0))
        phi = np.mod(np.arctan2(y[..., 1], y[..., 0]), TWO_PI)
        return np.stack([theta, phi], axis=-1)

    def sampler(u: NDArray[np.float64]) -> NDArray[np.float64]:
        u = np.asarray(u, dtype=np.float64)
        top = math.cos(margin)
        theta = np.arccos(top * (1.0 - 2.0 * u[..., 0]))
        return np.stack([theta, TWO_PI * u[..., 1]], axis=-1)

    return EmbeddedManifold(
        name="sphere" if r == 1.0 else f"sphere(r={r:g})",
        intrinsic_dim=2,
        ambient_dim=3,
        chart_lower=(0.0, 0.0),
        chart_upper=(math.pi, TWO_PI),
        embedding=embedding,
        periodic=(False, True),
        singular_coords=((0, 0.0), (0, math.pi)),
        singular_margin=margin,
        analytic_jacobian=jacobian,
        analytic_metric=metric,
        analytic_christoffel=christoffel,
        analytic_exp=exp,
        analytic_diameter=math.pi * r,
        chart_inverse=inverse,
        area_sampler=sampler,
        base_point=(math.pi / 2.0, 0.0),
    )


def clifford_torus(center: Optional[ArrayLike] = None) -> EmbeddedManifold:
    """
    Flat torus (cos u, sin u, cos v, sin v) in R^4 with metric g = I.

    Geodesics are straight lines in the chart. The diameter is attained at
    the chart offset (pi, pi), giving pi * sqrt(2).
    """
    c = _center(center, 4)

    def embedding(p: NDArray[np.float64]) -> NDArray[np.float64]:
        u, v = p[..., 0], p[..., 1]
        return c + np.stack([np.cos(u), np.sin(u), np.cos(v), np.sin(v)], axis=-1)

    def jacobian(p: NDArray[np.float64]) -> NDArray[np.float64]:
        u, v = p[..., 0], p[..., 1]
        zero = np.zeros_like(u)
        d_u = np.stack([-np.sin(u), np.cos(u), zero, zero], axis=-1)
        d_v = np.stack([zero, zero, -np.sin(v), np.cos(v)], axis=-1)
        return np.stack([d_u, d_v], axis=-1)

    def metric(p: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.broadcast_to(np.eye(2), p.shape[:-1] + (2, 2)).copy()

    def christoffel(p: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.zeros(p.shape[:-1] + (2, 2, 2))

    def exp(q: NDArray[np.float64], v: NDArray[np.float64]) -> NDArray[np.float64]:
        return embedding(np.asarray(q) + np.asarray(v))

    def inverse(x: NDArray[np.float64]) -> NDArray[np.float64]:
        y = np.asarray(x, dtype=np.float64) - c
        u = np.mod(np.arctan2(y[..., 1], y[..., 0]), TWO_PI)
        v = np.mod(np.arctan2(y[..., 3], y[..., 2]), TWO_PI)
        return np.stack([u, v], axis=-1)

    def sampler(u: NDArray[np.float64]) -> NDArray[np.float64]:
        return TWO_PI * np.asarray(u)

    return EmbeddedManifold(
        name="clifford-torus",
        intrinsic_dim=2,
        ambient_dim=4,
        chart_lower=(0.0, 0.0),
        chart_upper=(TWO_PI, TWO_PI),
        embedding=embedding,
        periodic=(True, True),
        analytic_jacobian=jacobian,
        analytic_metric=metric,
        analytic_christoffel=christoffel,
        analytic_exp=exp,
        analytic_diameter=math.pi * math.sqrt(2.0),
        chart_inverse=inverse,
        area_sampler=sampler,
        base_point=(0.0, 0.0),
    )


def doughnut_torus(
    major_radius: float = 2.0,
    minor_radius: float = 0.5,
    center: Optional[ArrayLike] = None,
) -> EmbeddedManifold:
    """
    Torus of revolution in R^3.

    Metric diag((R + r cos v)^2, r^2). No closed-form exponential map or
    diameter; sampling is by rejection.
    """
    big = _positive("major_radius", major_radius)
    small = _positive("minor_radius", minor_radius)
    if small >= big:
        raise InvalidParameterError(
            f"minor_radius must be below major_radius ({big}), got {small}"
        )
    c = _center(center, 3)

    def embedding(p: NDArray[np.float64]) -> NDArray[np.float64]:
        u, v = p[..., 0], p[..., 1]
        rho = big + small * np.cos(v)
        return c + np.stack([rho * np.cos(u), rho * np.sin(u), small * np.sin(v)], -1)

    def jacobian(p: NDArray[np.float64]) -> NDArray[np.float64]:
        u, v = p[..., 0], p[..., 1]
        rho = big + small * np.cos(v)
        d_u = np.stack([-rho * np.sin(u), rho * np.cos(u), np.zeros_like(u)], -1)
        d_v = np.stack(
            [-small * np.sin(v) * np.cos(u), -small * np.sin(v) * np.sin(u),
             small * np.cos(v)],
            axis=-1,
        )
        return np.stack([d_u, d_v], axis=-1)

    def metric(p: NDArray[np.float64]) -> NDArray[np.float64]:
        rho = big + small * np.cos(p[..., 1])
        g = np.zeros(p.shape[:-1] + (2, 2))
        g[..., 0, 0] = rho**2
        g[..., 1, 1] = small**2
        return g

    def christoffel(p: NDArray[np.float64]) -> NDArray[np.float64]:
        v = p[..., 1]
        rho = big + small * np.cos(v)
        gamma = np.zeros(p.shape[:-1] + (2, 2, 2))
        gamma[..., 0, 0, 1] = -small * np.sin(v) / rho
        gamma[..., 0, 1, 0] = -small * np.sin(v) / rho
        gamma[..., 1, 0, 0] = rho * np.sin(v) / small
        return gamma

    def inverse(x: NDArray[np.float64]) -> NDArray[np.float64]:
        y = np.asarray(x, dtype=np.float64) - c
        u = np.mod(np.arctan2(y[..., 1], y[..., 0]), TWO_PI)
        radial = np.hypot(y[..., 0], y[..., 1]) - big
        v = np.mod(np.arctan2(y[..., 2], radial), TWO_PI)
        return np.stack([u, v], axis=-1)

    return EmbeddedManifold(
        name="torus3",
        intrinsic_dim=2,
        ambient_dim=3,
        chart_lower=(0.0, 0.0),
        chart_upper=(TWO_PI, TWO_PI),
        embedding=embedding,
        periodic=(True, True),
        analytic_jacobian=jacobian,
        analytic_metric=metric,
        analytic_christoffel=christoffel,
        chart_inverse=inverse,
        base_point=(0.0, 0.0),
    )


_BUILDERS: dict[str, Callable[..., EmbeddedManifold]] = {
    "circle": circle,
    "sphere": sphere,
    "clifford-torus": clifford_torus,
    "torus3": doughnut_torus,
}

MANIFOLD_IDS: tuple[str, ...] = tuple(_BUILDERS)


def get_manifold(manifold_id: str, **params: Any) -> EmbeddedManifold:
    """
    Build a catalog manifold by identifier.

    Parameters
    ----------
    manifold_id : str
        One of ``"circle"``, ``"sphere"``, ``"clifford-torus"``, ``"torus3"``.
    **params
        Passed to the builder (e.g. ``radius``, ``center``).

    Raises
    ------
    InvalidParameterError
        For an unknown identifier or unsupported parameter.
    """
    try:
        builder = _BUILDERS[manifold_id]
    except KeyError:
        raise InvalidParameterError(
            f"Unknown manifold '{manifold_id}'. Available: {', '.join(MANIFOLD_IDS)}"
        ) from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise InvalidParameterError(
            f"Invalid parameters for manifold '{manifold_id}': {exc}"
        ) from exc


def list_manifolds() -> Sequence[str]:
    """Identifiers of all catalog manifolds."""
    return MANIFOLD_IDS
