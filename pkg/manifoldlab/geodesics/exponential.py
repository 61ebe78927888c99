"""Riemannian exponential map exp_q(v) = gamma(1)."""

from __future__ import annotations

import logging
import math
import warnings
from typing import Literal, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import InvalidParameterError
from manifoldlab.geodesics.integrator import integrate_geodesics, metric_speeds
from manifoldlab.manifolds import EmbeddedManifold, TangentVector

logger = logging.getLogger(__name__)

ExpMethod = Literal["auto", "analytic", "numeric"]

STEPS_PER_UNIT_LENGTH = 64
MIN_STEPS = 64
_BATCH_CHUNK = 1 << 14


def default_steps(speed: float) -> int:
    """Step count max(64, ceil(64 * |v|_g)) for unit-time integration."""
    return max(MIN_STEPS, math.ceil(STEPS_PER_UNIT_LENGTH * float(speed)))


def _check_method(manifold: EmbeddedManifold, method: str) -> bool:
    """Return True when the analytic path should be used."""
    if method not in ("auto", "analytic", "numeric"):
        raise InvalidParameterError(
            f"method must be 'auto', 'analytic' or 'numeric', got {method}"
        )
    if method == "analytic" and manifold.analytic_exp is None:
        raise InvalidParameterError(f"{manifold.name} has no closed-form exponential map")
    return method == "analytic" or (method == "auto" and manifold.analytic_exp is not None)


def exp_map_batch(
    manifold: EmbeddedManifold,
    q: ArrayLike,
    v: ArrayLike,
    method: ExpMethod = "auto",
    steps: int | None = None,
) -> NDArray[np.float64]:
    """
    Exponential map for many (q, v) pairs.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Target manifold.
    q, v : array_like
        Base points and velocities, shape ``(N, d)`` (``q`` may be ``(d,)``
        to share one base point).
    method : {"auto", "analytic", "numeric"}, optional
        ``auto`` uses the closed form when available.
    steps : int, optional
        RK4 steps for the numeric path. Defaults to the length-based rule
        applied to the longest velocity in the batch.

    Returns
    -------
    NDArray[np.float64]
        Ambient points, shape ``(N, n)``.

    Raises
    ------
    GeodesicEscapeError, SingularityError
        From numeric integration when no closed form is available to
        reroute through.
    """
    use_analytic = _check_method(manifold, method)
    v_arr = np.atleast_2d(np.asarray(v, dtype=np.float64))
    q_arr = np.broadcast_to(np.asarray(q, dtype=np.float64), v_arr.shape).copy()
    if use_analytic:
        assert manifold.analytic_exp is not None
        return np.asarray(manifold.analytic_exp(q_arr, v_arr), dtype=np.float64)

    out = np.empty((v_arr.shape[0], manifold.ambient_dim))
    for start in range(0, v_arr.shape[0], _BATCH_CHUNK):
        sl = slice(start, start + _BATCH_CHUNK)
        out[sl] = _numeric_exp(manifold, q_arr[sl], v_arr[sl], steps)
    return out


def _numeric_exp(
    manifold: EmbeddedManifold,
    q: NDArray[np.float64],
    v: NDArray[np.float64],
    steps: int | None,
) -> NDArray[np.float64]:
    if steps is None:
        speeds = metric_speeds(manifold, q, v)
        steps = default_steps(float(np.max(speeds)) if speeds.size else 0.0)
    logger.debug(
        "numeric exp on %s: %d geodesics, %d steps", manifold.name, q.shape[0], steps
    )
    on_failure = "mask" if manifold.analytic_exp is not None else "raise"
    result = integrate_geodesics(manifold, q, v, 1.0, steps, on_failure=on_failure)
    ambient = np.asarray(manifold.embedding(result.positions), dtype=np.float64)
    if np.any(result.failed):
        assert manifold.analytic_exp is not None
        rows = result.failed
        warnings.warn(
            f"{int(np.count_nonzero(rows))} geodesic(s) on {manifold.name} crossed "
            "a chart singularity; using the closed-form exponential for them",
            UserWarning,
            stacklevel=3,
        )
        ambient[rows] = manifold.analytic_exp(q[rows], v[rows])
    return ambient


def exp_map(
    manifold: EmbeddedManifold,
    q: ArrayLike,
    v: Union[ArrayLike, TangentVector],
    method: ExpMethod = "auto",
    steps: int | None = None,
) -> NDArray[np.float64]:
    """
    Exponential map at a single base point.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Target manifold.
    q : array_like
        Base chart point.
    v : array_like or TangentVector
        Tangent vector at ``q`` (chart components).
    method : {"auto", "analytic", "numeric"}, optional
        ``auto`` uses the closed form when available; ``numeric`` always
        integrates, falling back to the closed form only when the geodesic
        crosses a chart singularity.
    steps : int, optional
        Override the default RK4 step count.

    Returns
    -------
    NDArray[np.float64]
        Ambient point exp_q(v). ``exp_q(0)`` is the embedding of ``q``.

    Raises
    ------
    InvalidParameterError
        If a TangentVector is based at a different point.
    ChartDomainError
        If ``q`` is outside the chart domain.

    Examples
    --------
    >>> import math
    >>> from manifoldlab.manifolds import get_manifold
    >>> exp_map(get_manifold("circle"), [0.0], [math.pi]).round(12)
    array([-1.,  0.])
    """
    base = manifold.validate_point(q)
    if isinstance(v, TangentVector):
        if not np.array_equal(v.base, base):
            raise InvalidParameterError("tangent vector is not based at q")
        components = v.components
    else:
        components = np.asarray(v, dtype=np.float64).reshape(base.shape)
    if not np.all(np.isfinite(components)):
        raise InvalidParameterError("tangent vector must be finite")
    return exp_map_batch(manifold, base, components[None, :], method, steps)[0]
