"""Surjection of the latent cube onto a compact manifold.

f(z) = exp_q(R0 * F z) for z in I_d = [-1, 1]^d, where F is a
g(q)-orthonormal frame. The scaled cube contains the metric ball of radius
R0 in T_qM, and every point of M is reached by a geodesic of length at most
the diameter, so f is onto whenever R0 is at least the diameter.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import InvalidParameterError
from manifoldlab.geodesics import exp_map_batch
from manifoldlab.geodesics.exponential import ExpMethod
from manifoldlab.manifolds import (
    EmbeddedManifold,
    check_metric,
    embed_points,
    metric,
    sample_uniform,
    sobol_points,
    spawn_seeds,
)
from manifoldlab.manifolds.sampling import SeedLike
from manifoldlab.metric_geometry import PointCloud, hausdorff, net_fineness

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratorMap:
    """
    Map f: I_d -> M, z -> exp_q(R0 * frame @ z).

    Attributes
    ----------
    manifold : EmbeddedManifold
        Target manifold.
    base_point : NDArray[np.float64]
        Chart point q.
    radius : float
        R0.
    orthonormal_frame : NDArray[np.float64]
        d x d matrix whose columns are g(q)-orthonormal.
    method : str
        Exponential-map evaluation method.
    """

    manifold: EmbeddedManifold
    base_point: NDArray[np.float64]
    radius: float
    orthonormal_frame: NDArray[np.float64]
    method: ExpMethod = "auto"

    @property
    def latent_dim(self) -> int:
        """Latent (= intrinsic) dimension d."""
        return self.manifold.intrinsic_dim

    @property
    def ambient_dim(self) -> int:
        """Ambient dimension n."""
        return self.manifold.ambient_dim

    def tangent_vectors(self, z: ArrayLike) -> NDArray[np.float64]:
        """Chart tangent vectors R0 * frame @ z for a batch of latents."""
        latents = np.atleast_2d(np.asarray(z, dtype=np.float64))
        return self.radius * latents @ self.orthonormal_frame.T

    def evaluate(self, z: ArrayLike) -> NDArray[np.float64]:
        """
        Evaluate f on latent points.

        Parameters
        ----------
        z : array_like
            Shape ``(d,)`` or ``(N, d)``.

        Returns
        -------
        NDArray[np.float64]
            Shape ``(n,)`` or ``(N, n)`` matching the input.
        """
        latents = np.asarray(z, dtype=np.float64)
        single = latents.ndim == 1
        batch = np.atleast_2d(latents)
        if batch.shape[1] != self.latent_dim:
            raise InvalidParameterError(
                f"latent points must have {self.latent_dim} coordinates, "
                f"got {batch.shape[1]}"
            )
        out = exp_map_batch(
            self.manifold, self.base_point, self.tangent_vectors(batch), self.method
        )
        return out[0] if single else out

    __call__ = evaluate


def orthonormal_frame(g: NDArray[np.float64]) -> NDArray[np.float64]:
    """
    Gram-Schmidt of the coordinate basis in the inner product g.

    With g = L L^T this is L^{-T}, an upper-triangular frame F with
    F^T g F = I.
    """
    check_metric(g[None, :, :])
    lower = np.linalg.cholesky(g)
    return np.linalg.solve(lower.T, np.eye(g.shape[0]))


def build_generator(
    manifold: EmbeddedManifold,
    radius: float,
    base_point: Optional[ArrayLike] = None,
    method: ExpMethod = "auto",
) -> GeneratorMap:
    """
    Build the exponential-map surjection of I_d onto M.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Target manifold.
    radius : float
        R0, nonnegative. Zero collapses the image to a point.
    base_point : array_like, optional
        Interior chart point q; defaults to the manifold's base point.
    method : {"auto", "analytic", "numeric"}, optional
        Exponential-map method.

    Returns
    -------
    GeneratorMap

    Raises
    ------
    InvalidParameterError
        If ``radius`` is negative or no base point is available.
    SingularityError
        If the metric is degenerate at q.

    Examples
    --------
    >>> import math
    >>> from manifoldlab.manifolds import get_manifold
    >>> f = build_generator(get_manifold("circle"), math.pi)
    >>> f.evaluate([1.0]).round(12)
    array([-1.,  0.])
    """
    if radius < 0 or not np.isfinite(radius):
        raise InvalidParameterError(f"radius must be nonnegative, got {radius}")
    if radius == 0:
        warnings.warn(
            "radius 0 maps the whole cube to the base point",
            UserWarning,
            stacklevel=2,
        )
    if base_point is None:
        if manifold.base_point is None:
            raise InvalidParameterError(f"{manifold.name} has no default base point")
        base_point = manifold.base_point
    q = manifold.validate_point(base_point)
    frame = orthonormal_frame(metric(manifold, q).matrix)
    logger.debug("generator on %s at q=%s, R0=%.6g", manifold.name, q, radius)
    return GeneratorMap(
        manifold=manifold,
        base_point=q,
        radius=float(radius),
        orthonormal_frame=frame,
        method=method,
    )


def check_cube_contains_ball(
    gen: GeneratorMap, directions: int = 10_000, seed: SeedLike = None
) -> float:
    """
    Largest cube coordinate needed to reach R0 * w for g-unit vectors w.

    A value <= 1 means the scaled cube R0 * F(I_d) contains the metric ball
    of radius R0 in T_qM along every sampled direction.
    """
    rng = np.random.default_rng(seed)
    d = gen.latent_dim
    g = metric(gen.manifold, gen.base_point).matrix
    raw = rng.standard_normal((directions, d))
    norms = np.sqrt(np.einsum("ni,ij,nj->n", raw, g, raw))
    unit = raw / norms[:, None]
    latents = np.linalg.solve(gen.orthonormal_frame, unit.T).T
    return float(np.max(np.abs(latents)))


def latent_grid(dim: int, resolution: int, seed: SeedLike = None) -> NDArray[np.float64]:
    """
    Latent sample of I_d.

    Tensor grid of ``resolution`` points per axis (endpoints included) for
    d <= 2; ``resolution`` scrambled Sobol points for d >= 3.
    """
    if resolution < 1:
        raise InvalidParameterError(f"resolution must be positive, got {resolution}")
    if dim <= 2:
        axis = np.linspace(-1.0, 1.0, resolution) if resolution > 1 else np.zeros(1)
        mesh = np.meshgrid(*([axis] * dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)
    rng = np.random.default_rng(seed)
    return 2.0 * sobol_points(dim, resolution, rng) - 1.0


@dataclass
class SurjectivityResult:
    """
    Hausdorff comparison of f(latent grid) with a manifold sample.

    Attributes
    ----------
    distance : float
        Hausdorff distance between the two clouds.
    generated : PointCloud
        Image of the latent grid.
    reference : PointCloud
        Area-uniform manifold sample.
    generated_fineness, reference_fineness : float
        Net fineness of each cloud.
    """

    distance: float
    generated: PointCloud
    reference: PointCloud
    generated_fineness: float
    reference_fineness: float


def surjectivity_check(
    gen: GeneratorMap,
    grid_resolution: int,
    manifold_sample_count: int,
    seed: SeedLike = None,
) -> SurjectivityResult:
    """Full surjectivity comparison including both clouds and their fineness."""
    if manifold_sample_count < 1:
        raise InvalidParameterError(
            f"manifold_sample_count must be positive, got {manifold_sample_count}"
        )
    latent_seed, sample_seed = spawn_seeds(seed, 2)
    latents = latent_grid(gen.latent_dim, grid_resolution, latent_seed)
    generated = gen.evaluate(latents)
    chart = sample_uniform(
        gen.manifold, manifold_sample_count, sample_seed, low_discrepancy=True
    )
    reference = embed_points(gen.manifold, chart, validate=False)
    distance = hausdorff(generated, reference)
    logger.info(
        "surjectivity on %s: %d generated vs %d sampled, d_H = %.6g",
        gen.manifold.name,
        generated.shape[0],
        reference.shape[0],
        distance,
    )
    return SurjectivityResult(
        distance=distance,
        generated=PointCloud(generated, label="generated"),
        reference=PointCloud(reference, label=gen.manifold.name),
        generated_fineness=net_fineness(generated),
        reference_fineness=net_fineness(reference),
    )


def verify_surjectivity(
    gen: GeneratorMap,
    grid_resolution: int,
    manifold_sample_count: int,
    seed: SeedLike = None,
) -> float:
    """
    Hausdorff distance between f(latent grid) and an area-uniform sample.

    Parameters
    ----------
    gen : GeneratorMap
        Generator to check.
    grid_resolution : int
        Points per latent axis (d <= 2) or Sobol count (d >= 3).
    manifold_sample_count : int
        Size of the manifold sample.
    seed : int, SeedSequence or Generator, optional
        Sampling seed.

    Returns
    -------
    float
        Small when f(I_d) covers M densely.
    """
    return surjectivity_check(gen, grid_resolution, manifold_sample_count, seed).distance
