"""Area-uniform sampling of chart points."""

from __future__ import annotations

import logging
import math
from typing import Union

import numpy as np
from numpy.typing import NDArray
from scipy.stats import qmc

from manifoldlab.exceptions import InvalidParameterError
from manifoldlab.manifolds.core import EmbeddedManifold
from manifoldlab.manifolds.differential import volume_density

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]

_PILOT_SIZE = 4096
_ENVELOPE = 1.1


def spawn_seeds(seed: SeedLike, count: int) -> list[SeedLike]:
    """
    Independent child seeds for sub-steps of one computation.

    A Generator is shared as-is, since drawing from it in sequence is
    already deterministic.
    """
    if isinstance(seed, np.random.Generator):
        return [seed] * count
    if isinstance(seed, np.random.SeedSequence):
        return list(seed.spawn(count))
    return list(np.random.SeedSequence(seed).spawn(count))


def sobol_points(
    dim: int, count: int, rng: np.random.Generator
) -> NDArray[np.float64]:
    """
    Scrambled Sobol points in the unit cube.

    Draws ``2**ceil(log2(count))`` points and keeps the first ``count`` so the
    balance properties of the sequence are preserved.
    """
    if count < 1:
        raise InvalidParameterError(f"count must be positive, got {count}")
    engine = qmc.Sobol(d=dim, scramble=True, seed=rng)
    m = max(0, math.ceil(math.log2(count)))
    return engine.random_base2(m)[:count]


def sampling_box(
    manifold: EmbeddedManifold,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Chart box with singular bands at the faces trimmed off."""
    lower = manifold.lower.copy()
    upper = manifold.upper.copy()
    for axis, value in manifold.singular_coords:
        if abs(value - lower[axis]) <= manifold.singular_margin:
            lower[axis] = max(lower[axis], value + manifold.singular_margin)
        if abs(value - upper[axis]) <= manifold.singular_margin:
            upper[axis] = min(upper[axis], value - manifold.singular_margin)
    return lower, upper


def _rejection_sample(
    manifold: EmbeddedManifold,
    count: int,
    rng: np.random.Generator,
    low_discrepancy: bool,
    lower: NDArray[np.float64],
    upper: NDArray[np.float64],
) -> NDArray[np.float64]:
    d = manifold.intrinsic_dim
    width = upper - lower

    pilot = lower + width * rng.random((_PILOT_SIZE, d))
    bound = _ENVELOPE * float(np.max(volume_density(manifold, pilot)))

    batch = 1 << max(10, math.ceil(math.log2(2 * count)))
    engine = qmc.Sobol(d=d, scramble=True, seed=rng) if low_discrepancy else None
    accepted: list[NDArray[np.float64]] = []
    total = 0
    while total < count:
        unit = engine.random(batch) if engine is not None else rng.random((batch, d))
        proposals = lower + width * unit
        proposals = proposals[~manifold.in_singular_band(proposals)]
        density = volume_density(manifold, proposals)
        keep = rng.random(proposals.shape[0]) * bound < density
        accepted.append(proposals[keep])
        total += int(np.count_nonzero(keep))
    samples = np.concatenate(accepted)[:count]
    logger.debug(
        "rejection sampled %d points on %s (envelope %.4g)",
        count,
        manifold.name,
        bound,
    )
    return samples


def sample_uniform(
    manifold: EmbeddedManifold,
    count: int,
    seed: SeedLike = None,
    low_discrepancy: bool = False,
) -> NDArray[np.float64]:
    """
    Draw chart points distributed uniformly in Riemannian measure.

    Manifolds with an area sampler map unit-cube points through it;
    others are sampled by rejection against sqrt(det g) inside the chart
    box minus the singular bands.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Manifold to sample.
    count : int
        Number of points.
    seed : int, SeedSequence or Generator, optional
        Randomness source.
    low_discrepancy : bool, optional
        Use scrambled Sobol points instead of pseudo-random ones.

    Returns
    -------
    NDArray[np.float64]
        Chart points of shape ``(count, d)``.
    """
    if count < 1:
        raise InvalidParameterError(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    d = manifold.intrinsic_dim
    if manifold.area_sampler is None:
        return _rejection_sample(manifold, count, rng, low_discrepancy, *sampling_box(manifold))
    unit = sobol_points(d, count, rng) if low_discrepancy else rng.random((count, d))
    return np.asarray(manifold.area_sampler(unit), dtype=np.float64)


def sample_in_box(
    manifold: EmbeddedManifold,
    lower: NDArray[np.float64],
    upper: NDArray[np.float64],
    count: int,
    seed: SeedLike = None,
    low_discrepancy: bool = False,
) -> NDArray[np.float64]:
    """
    Riemannian-uniform chart points restricted to the box ``[lower, upper]``.

    Raises
    ------
    InvalidParameterError
        If the box is empty or ``count`` is not positive.
    """
    if count < 1:
        raise InvalidParameterError(f"count must be positive, got {count}")
    lo = np.asarray(lower, dtype=np.float64)
    hi = np.asarray(upper, dtype=np.float64)
    if lo.shape != (manifold.intrinsic_dim,) or hi.shape != lo.shape or np.any(hi <= lo):
        raise InvalidParameterError(f"sampling box [{lo}, {hi}] is empty or misshapen")
    rng = np.random.default_rng(seed)
    return _rejection_sample(manifold, count, rng, low_discrepancy, lo, hi)
