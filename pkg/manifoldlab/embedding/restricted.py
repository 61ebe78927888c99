"""Injectivity of a network restricted to a latent submanifold.

If f is an embedding of R^d and M_z is an embedded submanifold of R^d,
then f restricted to M_z is again an embedding, so f(M_z) is
diffeomorphic to M_z. Sampled evidence: the composite Jacobian
J_f(phi(p)) J_phi(p) keeps full rank dim M_z, and for a latent circle the
image stays a closed loop without self-intersections.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
from scipy.spatial.distance import cdist

from manifoldlab.embedding.rank import numeric_rank
from manifoldlab.exceptions import InvalidParameterError, ShapeError
from manifoldlab.manifolds import EmbeddedManifold, embed_points, jacobian_points, sample_uniform
from manifoldlab.manifolds.sampling import SeedLike
from manifoldlab.neural.network import NetworkSpec

logger = logging.getLogger(__name__)


@dataclass
class RestrictedInjectivity:
    """
    Result of :func:`check_restricted_injectivity`.

    Attributes
    ----------
    manifold : str
        Latent manifold name.
    manifold_dim : int
        Intrinsic dimension of the latent manifold.
    sample_count : int
        Number of chart samples.
    min_rank : int
        Smallest composite-Jacobian rank.
    rank_deficient_points : int
        Samples with rank below ``manifold_dim``.
    min_output_separation : float
        Smallest distance between images of distinct samples.
    """

    manifold: str
    manifold_dim: int
    sample_count: int
    min_rank: int
    rank_deficient_points: int
    min_output_separation: float

    @property
    def immersion_at_samples(self) -> bool:
        return self.rank_deficient_points == 0

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def check_restricted_injectivity(
    net: NetworkSpec,
    latent_manifold: EmbeddedManifold,
    samples: int = 256,
    seed: SeedLike = None,
) -> RestrictedInjectivity:
    """
    Rank of d(f o phi) at sampled chart points of a latent manifold.

    Parameters
    ----------
    net : NetworkSpec
        Network whose input dimension equals the latent manifold's ambient
        dimension.
    latent_manifold : EmbeddedManifold
        Latent set M_z, embedded by phi.
    samples : int, optional
        Number of area-uniform chart samples.
    seed : int, SeedSequence or Generator, optional
        Sampling seed.

    Raises
    ------
    ShapeError
        If the dimensions do not chain.
    """
    if net.input_dim != latent_manifold.ambient_dim:
        raise ShapeError(
            f"network input dimension {net.input_dim} does not match "
            f"{latent_manifold.name} ambient dimension {latent_manifold.ambient_dim}"
        )
    if samples < 2:
        raise InvalidParameterError(f"samples must be >= 2, got {samples}")
    chart = sample_uniform(latent_manifold, samples, seed)
    latents = embed_points(latent_manifold, chart, validate=False)
    composite = net.jacobian_batch(latents) @ jacobian_points(latent_manifold, chart)
    ranks = [numeric_rank(j).numeric_rank for j in composite]
    outputs = net.forward(latents)
    dist = cdist(outputs, outputs)
    np.fill_diagonal(dist, np.inf)
    d = latent_manifold.intrinsic_dim
    return RestrictedInjectivity(
        manifold=latent_manifold.name,
        manifold_dim=d,
        sample_count=samples,
        min_rank=min(ranks),
        rank_deficient_points=sum(r < d for r in ranks),
        min_output_separation=float(np.min(dist)),
    )


@dataclass
class LoopWitness:
    """
    Image of a latent circle under a network.

    Attributes
    ----------
    resolution : int
        Number of equally spaced circle samples.
    closing_gap : float
        Distance between the image of the last sample and the first.
    max_step : float
        Largest distance between images of consecutive samples.
    min_nonadjacent_distance : float
        Smallest distance between images of samples more than ``window``
        positions apart around the loop.
    window : int
        Neighbourhood excluded from the self-intersection test.
    """

    resolution: int
    closing_gap: float
    max_step: float
    min_nonadjacent_distance: float
    window: int

    @property
    def simple_closed(self) -> bool:
        """Closed and free of self-intersections at sample resolution."""
        return self.closing_gap <= self.max_step and self.min_nonadjacent_distance > 0

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["simple_closed"] = self.simple_closed
        return data


def loop_witness(
    net: NetworkSpec,
    resolution: int = 512,
    radius: float = 0.9,
    window: int = 2,
) -> LoopWitness:
    """
    Map the latent circle of ``radius`` in the first two input coordinates.

    Parameters
    ----------
    net : NetworkSpec
        Network with input dimension >= 2.
    resolution : int, optional
        Samples around the circle.
    radius : float, optional
        Circle radius inside the latent cube.
    window : int, optional
        Samples within this cyclic index distance are treated as adjacent.
    """
    if net.input_dim < 2:
        raise ShapeError("a latent circle needs input dimension >= 2")
    if resolution <= 2 * window + 1:
        raise InvalidParameterError(
            f"resolution must exceed 2 * window + 1, got {resolution}"
        )
    angles = 2.0 * np.pi * np.arange(resolution) / resolution
    latents = np.zeros((resolution, net.input_dim))
    latents[:, 0] = radius * np.cos(angles)
    latents[:, 1] = radius * np.sin(angles)
    images = net.forward(latents)

    steps = np.linalg.norm(np.roll(images, -1, axis=0) - images, axis=1)
    idx = np.arange(resolution)
    gap = np.abs(idx[:, None] - idx[None, :])
    cyclic = np.minimum(gap, resolution - gap)
    dist = cdist(images, images)
    far = dist[cyclic > window]
    witness = LoopWitness(
        resolution=resolution,
        closing_gap=float(steps[-1]),
        max_step=float(np.max(steps)),
        min_nonadjacent_distance=float(np.min(far)),
        window=window,
    )
    logger.debug("latent loop: %s", witness)
    return witness
