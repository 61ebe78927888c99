"""Fixed-step RK4 integration of the geodesic equation in chart coordinates.

The first-order system is q' = v, v'^k = -Gamma^k_ij v^i v^j. Periodic
chart axes are wrapped after every step; leaving a non-periodic axis or
entering a singular band stops the integration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import (
    GeodesicEscapeError,
    InvalidParameterError,
    SingularityError,
)
from manifoldlab.manifolds import EmbeddedManifold, christoffel_points, metric_points

logger = logging.getLogger(__name__)

OnFailure = Literal["raise", "mask"]


@dataclass(frozen=True)
class GeodesicState:
    """
    Point on a geodesic.

    Attributes
    ----------
    position : NDArray[np.float64]
        Chart coordinates.
    velocity : NDArray[np.float64]
        Chart velocity components.
    time : float
        Parameter time.
    """

    position: NDArray[np.float64]
    velocity: NDArray[np.float64]
    time: float


@dataclass(frozen=True)
class GeodesicTrajectory:
    """
    Sampled geodesic with constant time spacing.

    Attributes
    ----------
    positions : NDArray[np.float64]
        Shape ``(steps + 1, d)``.
    velocities : NDArray[np.float64]
        Shape ``(steps + 1, d)``.
    times : NDArray[np.float64]
        Shape ``(steps + 1,)``, ``times[i] = i * step_size``.
    step_size : float
        Fixed RK4 step.
    """

    positions: NDArray[np.float64]
    velocities: NDArray[np.float64]
    times: NDArray[np.float64]
    step_size: float

    def __len__(self) -> int:
        return int(self.times.shape[0])

    @property
    def states(self) -> list[GeodesicState]:
        """Trajectory as an ordered list of states."""
        return [
            GeodesicState(self.positions[i], self.velocities[i], float(self.times[i]))
            for i in range(len(self))
        ]

    @property
    def initial(self) -> GeodesicState:
        """First state."""
        return GeodesicState(self.positions[0], self.velocities[0], 0.0)

    @property
    def final(self) -> GeodesicState:
        """Last state."""
        return GeodesicState(
            self.positions[-1], self.velocities[-1], float(self.times[-1])
        )


@dataclass
class BatchIntegration:
    """
    Result of integrating many geodesics at once.

    Attributes
    ----------
    positions, velocities : NDArray[np.float64]
        Final states, shape ``(N, d)``.
    failed : NDArray[np.bool_]
        Rows stopped early by a singular band or domain exit (``mask`` mode).
    history : NDArray[np.float64], optional
        ``(steps + 1, N, 2, d)`` positions and velocities when recorded.
    """

    positions: NDArray[np.float64]
    velocities: NDArray[np.float64]
    failed: NDArray[np.bool_]
    step_size: float
    history: Optional[NDArray[np.float64]] = field(default=None, repr=False)


def _acceleration(
    manifold: EmbeddedManifold, q: NDArray[np.float64], v: NDArray[np.float64]
) -> NDArray[np.float64]:
    gamma = christoffel_points(manifold, q)
    return -np.einsum("nkij,ni,nj->nk", gamma, v, v)


def _rk4_step(
    manifold: EmbeddedManifold,
    q: NDArray[np.float64],
    v: NDArray[np.float64],
    h: float,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    k1q, k1v = v, _acceleration(manifold, q, v)
    q2, v2 = q + 0.5 * h * k1q, v + 0.5 * h * k1v
    k2q, k2v = v2, _acceleration(manifold, q2, v2)
    q3, v3 = q + 0.5 * h * k2q, v + 0.5 * h * k2v
    k3q, k3v = v3, _acceleration(manifold, q3, v3)
    q4, v4 = q + h * k3q, v + h * k3v
    k4q, k4v = v4, _acceleration(manifold, q4, v4)
    q_next = q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
    v_next = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return q_next, v_next


def _escaped(manifold: EmbeddedManifold, q: NDArray[np.float64]) -> NDArray[np.bool_]:
    fixed = ~np.asarray(manifold.periodic)
    outside = fixed & ((q < manifold.lower) | (q > manifold.upper))
    return np.any(outside, axis=-1) | ~np.all(np.isfinite(q), axis=-1)


def integrate_geodesics(
    manifold: EmbeddedManifold,
    q0: ArrayLike,
    v0: ArrayLike,
    total_time: float,
    steps: int,
    record: bool = False,
    on_failure: OnFailure = "raise",
) -> BatchIntegration:
    """
    Integrate a batch of geodesics with classical RK4.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Manifold whose geodesic equation is solved.
    q0, v0 : array_like
        Initial positions and velocities, shape ``(N, d)``.
    total_time : float
        Parameter time to integrate to (positive).
    steps : int
        Number of fixed steps.
    record : bool, optional
        Keep every intermediate state in ``history``.
    on_failure : {"raise", "mask"}, optional
        Raise on escape/singularity, or freeze the failing rows and flag
        them in ``failed``.

    Returns
    -------
    BatchIntegration

    Raises
    ------
    GeodesicEscapeError
        A trajectory left a non-periodic chart axis (``raise`` mode).
    SingularityError
        A trajectory entered a singular band (``raise`` mode).
    """
    if steps < 1:
        raise InvalidParameterError(f"steps must be >= 1, got {steps}")
    if not total_time > 0:
        raise InvalidParameterError(f"total_time must be positive, got {total_time}")
    if on_failure not in ("raise", "mask"):
        raise InvalidParameterError(f"on_failure must be 'raise' or 'mask', got {on_failure}")

    q = np.atleast_2d(np.asarray(q0, dtype=np.float64)).copy()
    v = np.atleast_2d(np.asarray(v0, dtype=np.float64)).copy()
    if q.shape != v.shape or q.shape[1] != manifold.intrinsic_dim:
        raise InvalidParameterError(
            f"q0 and v0 must have shape (N, {manifold.intrinsic_dim}), "
            f"got {q.shape} and {v.shape}"
        )

    h = total_time / steps
    failed = manifold.in_singular_band(q) | _escaped(manifold, q)
    if on_failure == "raise" and np.any(failed):
        raise SingularityError(f"initial point outside usable chart of {manifold.name}")

    history = np.empty((steps + 1,) + q.shape[:1] + (2, q.shape[1])) if record else None
    if history is not None:
        history[0, :, 0], history[0, :, 1] = q, v

    for step in range(steps):
        active = ~failed
        if np.any(active):
            q_new, v_new = _rk4_step(manifold, q[active], v[active], h)
            escaped = _escaped(manifold, q_new)
            singular = manifold.in_singular_band(q_new) & ~escaped
            if on_failure == "raise":
                exit_time = (step + 1) * h
                if np.any(escaped):
                    raise GeodesicEscapeError(
                        f"geodesic left chart domain of {manifold.name} "
                        f"at t={exit_time:.6g}",
                        exit_time=exit_time,
                    )
                if np.any(singular):
                    raise SingularityError(
                        f"geodesic entered singular band of {manifold.name} "
                        f"at t={exit_time:.6g}"
                    )
            ok = ~(escaped | singular)
            rows = np.flatnonzero(active)
            q[rows[ok]] = manifold.wrap(q_new[ok])
            v[rows[ok]] = v_new[ok]
            failed[rows[~ok]] = True
        if history is not None:
            history[step + 1, :, 0], history[step + 1, :, 1] = q, v

    if np.any(failed):
        logger.debug(
            "%d of %d geodesics on %s stopped early",
            int(np.count_nonzero(failed)),
            q.shape[0],
            manifold.name,
        )
    return BatchIntegration(
        positions=q, velocities=v, failed=failed, step_size=h, history=history
    )


def integrate_geodesic(
    manifold: EmbeddedManifold,
    q0: ArrayLike,
    v0: ArrayLike,
    total_time: float,
    steps: int,
) -> GeodesicTrajectory:
    """
    Integrate one geodesic and keep every intermediate state.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Target manifold.
    q0 : array_like
        Interior starting chart point.
    v0 : array_like
        Initial velocity in chart components.
    total_time : float
        Parameter time.
    steps : int
        Number of RK4 steps (>= 1).

    Returns
    -------
    GeodesicTrajectory

    Raises
    ------
    ChartDomainError
        If ``q0`` is outside the chart domain.
    GeodesicEscapeError
        If the trajectory leaves a non-periodic chart axis.
    SingularityError
        If the trajectory enters a singular band.

    Examples
    --------
    >>> from manifoldlab.manifolds import get_manifold
    >>> traj = integrate_geodesic(get_manifold("circle"), [0.0], [1.0], 1.0, 10)
    >>> round(float(traj.final.position[0]), 12)
    1.0
    """
    q = manifold.validate_point(q0)
    v = np.asarray(v0, dtype=np.float64).reshape(q.shape)
    result = integrate_geodesics(
        manifold, q[None, :], v[None, :], total_time, steps, record=True
    )
    assert result.history is not None
    times = result.step_size * np.arange(steps + 1)
    return GeodesicTrajectory(
        positions=result.history[:, 0, 0].copy(),
        velocities=result.history[:, 0, 1].copy(),
        times=times,
        step_size=result.step_size,
    )


def metric_speeds(
    manifold: EmbeddedManifold,
    positions: NDArray[np.float64],
    velocities: NDArray[np.float64],
) -> NDArray[np.float64]:
    """Metric speeds sqrt(v^T g v) for matching batches of states."""
    g = metric_points(manifold, positions)
    sq = np.einsum("...i,...ij,...j->...", velocities, g, velocities)
    return np.sqrt(np.maximum(sq, 0.0))


def speed_drift(manifold: EmbeddedManifold, trajectory: GeodesicTrajectory) -> float:
    """
    Largest deviation of metric speed from its initial value.

    Geodesics traverse at constant speed, so this measures integration
    error along the trajectory.
    """
    if len(trajectory) == 0:
        raise InvalidParameterError("trajectory must not be empty")
    speeds = metric_speeds(manifold, trajectory.positions, trajectory.velocities)
    return float(np.max(np.abs(speeds - speeds[0])))


def speed_drift_batch(manifold: EmbeddedManifold, result: BatchIntegration) -> NDArray[np.float64]:
    """Per-geodesic speed drift for a recorded batch integration."""
    if result.history is None:
        raise InvalidParameterError("batch integration was not recorded")
    positions = result.history[:, :, 0]
    velocities = result.history[:, :, 1]
    speeds = metric_speeds(manifold, positions, velocities)
    return np.max(np.abs(speeds - speeds[0]), axis=0)
