"""Embedding checks for expanding layers and whole networks.

A layer sigma(L z + b) with a smooth strictly monotone sigma is a smooth
embedding exactly when its linear part L is injective, and L can only be
injective when the layer is expanding (output size >= input size). For
expanding layers the rank-deficient weights form an algebraic set of
measure zero, so full rank at the actual weights plus full rank at random
Gaussian redraws is the finite evidence reported here.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import pdist

from manifoldlab.embedding.conv_matrix import linear_matrix
from manifoldlab.embedding.rank import numeric_rank, rank_is_stable
from manifoldlab.exceptions import InvalidParameterError
from manifoldlab.manifolds.sampling import SeedLike, spawn_seeds
from manifoldlab.neural.layers import Conv2D, ConvTranspose2D, FullyConnected, Layer
from manifoldlab.neural.network import NetworkSpec

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    """Outcome of a layer check."""

    EMBEDDING = "embedding"
    NOT_EXPANDING = "not_expanding"
    RANK_DEFICIENT = "rank_deficient"
    BAD_ACTIVATION = "bad_activation"


@dataclass
class EmbeddingVerdict:
    """
    Result of :func:`check_layer`.

    Attributes
    ----------
    expanding : bool
        Output size >= input size.
    injective_linear_part : bool
        Full column rank at the actual weights and at every redraw.
    activation_ok : bool
        Activation is smooth and strictly monotone.
    verdict : Verdict
        ``embedding`` only when all three flags hold.
    layer_kind : str
        Kind of the checked layer.
    input_dim, output_dim : int
        Flattened sizes.
    trials : int
        Number of Gaussian redraws.
    deficient_trials : int
        Redraws whose matrix lost rank.
    actual_rank : int
        Numeric rank at the layer's own weights.
    """

    expanding: bool
    injective_linear_part: bool
    activation_ok: bool
    verdict: Verdict
    layer_kind: str = ""
    input_dim: int = 0
    output_dim: int = 0
    trials: int = 0
    deficient_trials: int = 0
    actual_rank: int = 0

    @property
    def is_embedding(self) -> bool:
        return self.verdict is Verdict.EMBEDDING

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["verdict"] = self.verdict.value
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _redraw(layer: Layer, rng: np.random.Generator) -> Layer:
    """Copy of ``layer`` with standard Gaussian weights."""
    if isinstance(layer, FullyConnected):
        return FullyConnected(layer.activation, rng.standard_normal(layer.matrix.shape), layer.offset)
    if isinstance(layer, Conv2D):
        return Conv2D(
            layer.activation,
            rng.standard_normal(layer.kernel.shape),
            layer.offset,
            layer.in_size,
            layer.stride,
        )
    if isinstance(layer, ConvTranspose2D):
        return ConvTranspose2D(
            layer.activation,
            rng.standard_normal(layer.kernel.shape),
            layer.offset,
            layer.out_size,
            layer.stride,
        )
    raise InvalidParameterError(f"cannot redraw weights of layer kind {layer.kind}")


def check_layer(layer: Layer, trials: int = 100, seed: SeedLike = None) -> EmbeddingVerdict:
    """
    Decide whether a layer is a smooth embedding.

    Parameters
    ----------
    layer : Layer
        Fully connected, conv or conv_transpose layer.
    trials : int, optional
        Gaussian weight redraws (>= 1).
    seed : int, SeedSequence or Generator, optional
        Seed of the redraws; each trial gets its own child seed.

    Returns
    -------
    EmbeddingVerdict

    Examples
    --------
    >>> layer = FullyConnected("tanh", np.array([[1.0], [0.0]]), np.zeros(2))
    >>> check_layer(layer, trials=5, seed=0).verdict.value
    'embedding'
    """
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    expanding = layer.output_dim >= layer.input_dim
    activation_ok = layer.activation.smooth_monotone
    common = dict(
        layer_kind=layer.kind,
        input_dim=layer.input_dim,
        output_dim=layer.output_dim,
        trials=trials,
    )
    if not expanding:
        return EmbeddingVerdict(
            expanding=False,
            injective_linear_part=False,
            activation_ok=activation_ok,
            verdict=Verdict.NOT_EXPANDING,
            actual_rank=numeric_rank(linear_matrix(layer)).numeric_rank,
            **common,
        )

    actual = numeric_rank(linear_matrix(layer))
    deficient = 0
    for child in spawn_seeds(seed, trials):
        redrawn = _redraw(layer, np.random.default_rng(child))
        if not numeric_rank(linear_matrix(redrawn)).full_rank:
            deficient += 1
    injective = actual.full_rank and deficient == 0

    if not activation_ok:
        verdict = Verdict.BAD_ACTIVATION
    elif not injective:
        verdict = Verdict.RANK_DEFICIENT
    else:
        verdict = Verdict.EMBEDDING
    logger.debug(
        "%s %d -> %d: rank %d, %d/%d deficient redraws, %s",
        layer.kind,
        layer.input_dim,
        layer.output_dim,
        actual.numeric_rank,
        deficient,
        trials,
        verdict.value,
    )
    return EmbeddingVerdict(
        expanding=True,
        injective_linear_part=injective,
        activation_ok=activation_ok,
        verdict=verdict,
        deficient_trials=deficient,
        actual_rank=actual.numeric_rank,
        **common,
    )


@dataclass
class InjectivityReport:
    """
    Result of :func:`check_network_injectivity`.

    Attributes
    ----------
    precondition_ok : bool
        Every layer is expanding.
    non_expanding_layers : list of int
        Indices of layers that shrink their input.
    ranks : list of int
        Numeric Jacobian rank at each sample.
    latent_dim : int
        Network input dimension.
    min_rank : int
        Smallest rank over the samples.
    rank_deficient_points : int
        Samples with rank below ``latent_dim``.
    rank_stable : bool
        Ranks unchanged when the tolerance moves by 10x either way.
    min_output_separation : float
        Smallest distance between outputs of distinct samples.
    distinct_outputs : bool
        ``min_output_separation > 0``.
    """

    precondition_ok: bool
    non_expanding_layers: list[int]
    ranks: list[int] = field(repr=False)
    latent_dim: int
    min_rank: int
    rank_deficient_points: int
    rank_stable: bool
    min_output_separation: float
    distinct_outputs: bool

    @property
    def immersion_at_samples(self) -> bool:
        return self.precondition_ok and self.rank_deficient_points == 0

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data.pop("ranks")
        return data


def check_network_injectivity(
    net: NetworkSpec, sample_points: ArrayLike | int, seed: SeedLike = None
) -> InjectivityReport:
    """
    Jacobian-rank and output-distinctness evidence that ``net`` embeds its domain.

    Parameters
    ----------
    net : NetworkSpec
        Network to check.
    sample_points : array_like or int
        Inputs ``(N, input_dim)``, or a count of points drawn uniformly
        from [-1, 1]^input_dim.
    seed : int, SeedSequence or Generator, optional
        Seed used when points are drawn.

    Returns
    -------
    InjectivityReport
        Deficiencies are reported, never raised.
    """
    if isinstance(sample_points, (int, np.integer)):
        rng = np.random.default_rng(seed)
        points = rng.uniform(-1.0, 1.0, (int(sample_points), net.input_dim))
    else:
        points = np.atleast_2d(np.asarray(sample_points, dtype=np.float64))
    non_expanding = [
        i for i, layer in enumerate(net.layers) if layer.output_dim < layer.input_dim
    ]

    ranks = []
    stable = True
    for jac in net.jacobian_batch(points):
        report = numeric_rank(jac)
        ranks.append(report.numeric_rank)
        stable = stable and rank_is_stable(report)

    outputs = net.forward(points)
    separation = float(np.min(pdist(outputs))) if len(points) > 1 else float("inf")
    d = net.input_dim
    result = InjectivityReport(
        precondition_ok=not non_expanding,
        non_expanding_layers=non_expanding,
        ranks=ranks,
        latent_dim=d,
        min_rank=min(ranks) if ranks else 0,
        rank_deficient_points=sum(r < d for r in ranks),
        rank_stable=stable,
        min_output_separation=separation,
        distinct_outputs=separation > 0,
    )
    if non_expanding:
        logger.warning("network layers %s are not expanding", non_expanding)
    return result


def check_network_layers(
    net: NetworkSpec, trials: int = 20, seed: SeedLike = None
) -> list[EmbeddingVerdict]:
    """:func:`check_layer` for every layer, with independent seeds."""
    seeds: Sequence[Any] = spawn_seeds(seed, len(net.layers))
    return [check_layer(layer, trials, s) for layer, s in zip(net.layers, seeds)]
