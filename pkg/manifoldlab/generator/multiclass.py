"""Multiclass construction: one latent slab per class joined by thin tunnels.

The first latent axis of I_d is cut at breakpoints x_i = -1 + 2i/c. Each
class gets a slab D_i shrunk by h = delta / (2(c - 1)) at every interior
breakpoint. On D_i the class generator is applied after stretching the
slab's first axis back to [-1, 1]; inside a gap the map interpolates
linearly between the two neighbouring generators evaluated on their
facing slab faces, which keeps the whole map continuous.

Measures are normalised so that I_d has total mass 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import InvalidParameterError, ShapeError
from manifoldlab.generator.surjection import GeneratorMap, latent_grid
from manifoldlab.manifolds.sampling import SeedLike

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SlabPartition:
    """
    Decomposition of I_d into c slabs separated by gaps of width 2h.

    Attributes
    ----------
    class_count : int
        Number of classes c (>= 2).
    delta : float
        Removed-measure budget in (0, 1).
    dim : int
        Latent dimension d.
    gap_half_width : float
        h = delta / (2(c - 1)).
    breakpoints : NDArray[np.float64]
        x_0 = -1, ..., x_c = 1 on the first axis.
    slabs : list of (NDArray, NDArray)
        ``(lower, upper)`` corners of each D_i.
    """

    class_count: int
    delta: float
    dim: int
    gap_half_width: float
    breakpoints: NDArray[np.float64] = field(repr=False)
    slabs: list[tuple[NDArray[np.float64], NDArray[np.float64]]] = field(repr=False)

    @property
    def removed_measure(self) -> float:
        """Normalised measure of I_d minus the slabs, (c - 1) * h."""
        return (self.class_count - 1) * self.gap_half_width

    @property
    def removed_measure_exact(self) -> Fraction:
        """The removed measure in exact rational arithmetic (= delta / 2)."""
        h = Fraction(str(self.delta)) / (2 * (self.class_count - 1))
        return (self.class_count - 1) * h

    def measured_removed_fraction(self) -> float:
        """1 minus the summed normalised slab volumes (floating point)."""
        kept = sum(float(np.prod((hi - lo) / 2.0)) for lo, hi in self.slabs)
        return 1.0 - kept

    def first_axis_interval(self, index: int) -> tuple[float, float]:
        """First-axis extent [a_i, b_i] of slab ``index``."""
        lo, hi = self.slabs[index]
        return float(lo[0]), float(hi[0])

    def slab_grid(self, index: int, resolution: int) -> NDArray[np.float64]:
        """Tensor grid over slab ``index`` with ``resolution`` points per axis."""
        a, b = self.first_axis_interval(index)
        grid = latent_grid(self.dim, resolution)
        grid[:, 0] = a + (grid[:, 0] + 1.0) * (b - a) / 2.0
        return grid

    def locate(self, z: ArrayLike) -> NDArray[np.int64]:
        """
        Region index for each latent point.

        ``2i`` means slab D_i, ``2i + 1`` the gap between D_i and D_{i+1}.
        """
        x = np.atleast_2d(np.asarray(z, dtype=np.float64))[:, 0]
        region = np.full(x.shape, -1, dtype=np.int64)
        for i in range(self.class_count):
            a, b = self.first_axis_interval(i)
            region[(x >= a) & (x <= b)] = 2 * i
            if i < self.class_count - 1:
                c, _ = self.first_axis_interval(i + 1)
                region[(x > b) & (x < c)] = 2 * i + 1
        return region


def build_multiclass_partition(class_count: int, delta: float, dim: int) -> SlabPartition:
    """
    Cut I_d into ``class_count`` slabs along the first axis.

    Parameters
    ----------
    class_count : int
        Number of classes c (>= 2).
    delta : float
        Budget in (0, 1); the removed normalised measure is delta / 2.
    dim : int
        Latent dimension d (>= 1).

    Returns
    -------
    SlabPartition

    Raises
    ------
    InvalidParameterError
        If a parameter is out of range or h leaves a slab empty.

    Examples
    --------
    >>> p = build_multiclass_partition(2, 0.2, 2)
    >>> p.gap_half_width
    0.1
    >>> [tuple(map(float, lo)) + tuple(map(float, hi)) for lo, hi in p.slabs]
    [(-1.0, -1.0, -0.1, 1.0), (0.1, -1.0, 1.0, 1.0)]
    """
    if class_count < 2:
        raise InvalidParameterError(f"class_count must be >= 2, got {class_count}")
    if not 0 < delta < 1:
        raise InvalidParameterError(f"delta must be in (0, 1), got {delta}")
    if dim < 1:
        raise InvalidParameterError(f"dim must be positive, got {dim}")

    h = delta / (2 * (class_count - 1))
    length = 2.0 / class_count
    if h >= length or (class_count > 2 and 2 * h >= length):
        raise InvalidParameterError(
            f"gap half-width {h:.6g} leaves no room in slabs of length {length:.6g}"
        )

    breakpoints = -1.0 + length * np.arange(class_count + 1)
    breakpoints[-1] = 1.0
    slabs = []
    for i in range(class_count):
        a = breakpoints[i] + (h if i > 0 else 0.0)
        b = breakpoints[i + 1] - (h if i < class_count - 1 else 0.0)
        lower = np.full(dim, -1.0)
        upper = np.full(dim, 1.0)
        lower[0], upper[0] = a, b
        slabs.append((lower, upper))
    return SlabPartition(
        class_count=class_count,
        delta=float(delta),
        dim=dim,
        gap_half_width=h,
        breakpoints=breakpoints,
        slabs=slabs,
    )


@dataclass(frozen=True)
class MulticlassMap:
    """
    Continuous map I_d -> R^n built from one generator per slab.

    Attributes
    ----------
    partition : SlabPartition
        Slab layout.
    generators : list of GeneratorMap
        One map per class, all with latent dimension d and equal ambient
        dimension.
    """

    partition: SlabPartition
    generators: Sequence[GeneratorMap]

    def __post_init__(self) -> None:
        c = self.partition.class_count
        if len(self.generators) != c:
            raise InvalidParameterError(
                f"expected {c} generators, got {len(self.generators)}"
            )
        ambient = {g.ambient_dim for g in self.generators}
        if len(ambient) != 1:
            raise ShapeError(f"generators disagree on ambient dimension: {sorted(ambient)}")
        latent = {g.latent_dim for g in self.generators}
        if latent != {self.partition.dim}:
            raise ShapeError(
                f"generator latent dimensions {sorted(latent)} do not match "
                f"partition dimension {self.partition.dim}"
            )

    @property
    def ambient_dim(self) -> int:
        """Shared ambient dimension."""
        return self.generators[0].ambient_dim

    def evaluate(self, z: ArrayLike) -> NDArray[np.float64]:
        """
        Evaluate the multiclass map on latent points of shape ``(N, d)``.

        Raises
        ------
        InvalidParameterError
            If a point lies outside I_d.
        """
        latents = np.atleast_2d(np.asarray(z, dtype=np.float64))
        if latents.shape[1] != self.partition.dim:
            raise ShapeError(
                f"latent points must have {self.partition.dim} coordinates, "
                f"got {latents.shape[1]}"
            )
        if np.any(np.abs(latents) > 1.0):
            raise InvalidParameterError("latent points must lie in [-1, 1]^d")
        region = self.partition.locate(latents)
        out = np.empty((latents.shape[0], self.ambient_dim))
        h = self.partition.gap_half_width
        for i, gen in enumerate(self.generators):
            mask = region == 2 * i
            if np.any(mask):
                a, b = self.partition.first_axis_interval(i)
                local = latents[mask].copy()
                local[:, 0] = -1.0 + 2.0 * (local[:, 0] - a) / (b - a)
                out[mask] = gen.evaluate(local)
            if i == len(self.generators) - 1:
                continue
            mask = region == 2 * i + 1
            if np.any(mask):
                _, b = self.partition.first_axis_interval(i)
                t = (latents[mask, 0] - b) / (2.0 * h)
                right_face = latents[mask].copy()
                right_face[:, 0] = 1.0
                left_face = latents[mask].copy()
                left_face[:, 0] = -1.0
                left = gen.evaluate(right_face)
                right = self.generators[i + 1].evaluate(left_face)
                out[mask] = (1.0 - t)[:, None] * left + t[:, None] * right
        return out

    __call__ = evaluate


def build_multiclass_map(
    partition: SlabPartition, generators: Sequence[GeneratorMap]
) -> MulticlassMap:
    """
    Join per-class generators into one continuous map of I_d.

    On D_i the map is f_i after renormalising D_i's first axis to [-1, 1];
    in the gap after D_i it is (1 - t) f_i(right face) + t f_{i+1}(left face).
    """
    return MulticlassMap(partition=partition, generators=list(generators))


@dataclass
class FaceContinuity:
    """
    Jumps of a multiclass map across slab faces.

    Attributes
    ----------
    max_jump : float
        Largest |f(face) - f(face + offset)| over sampled face pairs, both sides.
    offset : float
        Latent distance between paired points.
    lipschitz_estimate : float
        Largest finite-difference slope seen across the pairs.
    bound : float
        1e-9 + lipschitz_estimate * offset.
    """

    max_jump: float
    offset: float
    lipschitz_estimate: float
    bound: float

    @property
    def continuous(self) -> bool:
        """True when every jump is within the bound."""
        return self.max_jump <= self.bound


def face_continuity(
    mc_map: MulticlassMap,
    samples_per_face: int = 64,
    offset: float = 1e-7,
    seed: SeedLike = None,
) -> FaceContinuity:
    """
    Compare the map at slab faces with points just inside the adjacent gap.

    For every face, random points on the face are paired with the point
    ``offset`` further into the gap. The slope over ``offset`` and over
    ``2 * offset`` gives a local Lipschitz estimate.
    """
    rng = np.random.default_rng(seed)
    part = mc_map.partition
    jumps = []
    slopes = []
    for i in range(part.class_count - 1):
        _, b = part.first_axis_interval(i)
        c, _ = part.first_axis_interval(i + 1)
        for face, direction in ((b, 1.0), (c, -1.0)):
            base = rng.uniform(-1.0, 1.0, (samples_per_face, part.dim))
            base[:, 0] = face
            near = base.copy()
            near[:, 0] = face + direction * offset
            far = base.copy()
            far[:, 0] = face + 2.0 * direction * offset
            f_base = mc_map.evaluate(base)
            f_near = mc_map.evaluate(near)
            f_far = mc_map.evaluate(far)
            jumps.append(np.linalg.norm(f_near - f_base, axis=1))
            slopes.append(np.linalg.norm(f_far - f_near, axis=1) / offset)
    max_jump = float(np.max(np.concatenate(jumps)))
    lipschitz = float(np.max(np.concatenate(slopes)))
    bound = 1e-9 + lipschitz * offset
    logger.debug("face continuity: max jump %.3e, bound %.3e", max_jump, bound)
    return FaceContinuity(
        max_jump=max_jump, offset=offset, lipschitz_estimate=lipschitz, bound=bound
    )
