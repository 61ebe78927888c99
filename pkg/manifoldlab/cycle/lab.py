"""Paired networks approximating a diffeomorphism and its inverse.

If ||f_theta - f|| <= eps and ||g_phi - g|| <= eps with g o f = id, then

    ||g_phi(f_theta(x)) - x|| <= ||g_phi(f_theta(x)) - g_phi(f(x))|| + ||g_phi(f(x)) - g(f(x))||
                               <= (1 + Lip(g_phi)) * eps.

The Lipschitz constant is estimated by the largest sampled operator norm
of the tangential derivative, so the bound is checked with sampled
maxima rather than proved.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from manifoldlab.cycle.subsets import ChartSubset, ground_truth_diffeo
from manifoldlab.generator.surjection import latent_grid
from manifoldlab.manifolds import embed_points, jacobian_points, metric_points
from manifoldlab.manifolds.sampling import SeedLike, spawn_seeds
from manifoldlab.metric_geometry import hausdorff, net_fineness
from manifoldlab.neural import NetworkSpec, TrainConfig, max_pointwise_error, mlp, train_regression

logger = logging.getLogger(__name__)

AmbientMap = Callable[[NDArray[np.float64]], NDArray[np.float64]]

HOLDOUT_SIZE = 512
TANGENT_STEP = 1e-5
ROUNDOFF = 1e-9


@dataclass
class CyclePair:
    """
    Maps between two chart subsets, trained or exact.

    Attributes
    ----------
    forward_net : callable
        f_theta: ambient points of ``source`` -> ambient points of ``target``.
        A :class:`NetworkSpec` for trained pairs.
    backward_net : callable
        g_phi in the opposite direction.
    source, target : ChartSubset
        M_delta and N_delta.
    fit_eps : float
        Larger of the two held-out max pointwise fit errors.
    forward_fit_error, backward_fit_error : float
        The individual held-out errors.
    forward_history, backward_history : list of float
        Training loss histories (empty for exact pairs).
    training_seconds : float
        Wall-clock training time.
    """

    forward_net: AmbientMap
    backward_net: AmbientMap
    source: ChartSubset
    target: ChartSubset
    fit_eps: float
    forward_fit_error: float = 0.0
    backward_fit_error: float = 0.0
    forward_history: list[float] = field(default_factory=list, repr=False)
    backward_history: list[float] = field(default_factory=list, repr=False)
    training_seconds: float = 0.0

    @property
    def trained(self) -> bool:
        return isinstance(self.forward_net, NetworkSpec)


def holdout_points(subset: ChartSubset, count: int = HOLDOUT_SIZE) -> NDArray[np.float64]:
    """Ambient images of a regular chart grid of about ``count`` points."""
    per_axis = max(2, math.ceil(count ** (1.0 / subset.dim)))
    grid = latent_grid(subset.dim, per_axis) if subset.dim <= 2 else latent_grid(subset.dim, count, 0)
    return embed_points(subset.manifold, subset.denormalize(grid), validate=False)


def exact_pair(source: ChartSubset, target: ChartSubset) -> CyclePair:
    """Pair made of the ground-truth diffeomorphism and its inverse."""
    diffeo = ground_truth_diffeo(source, target)
    return CyclePair(
        forward_net=diffeo.forward,
        backward_net=diffeo.inverse,
        source=source,
        target=target,
        fit_eps=0.0,
    )


def train_cycle(
    source: ChartSubset,
    target: ChartSubset,
    hidden: Sequence[int] = (64,),
    config: Optional[TrainConfig] = None,
    sample_count: int = 2048,
    holdout: int = HOLDOUT_SIZE,
    seed: SeedLike = None,
) -> CyclePair:
    """
    Train f_theta ~ f and g_phi ~ g = f^-1 by supervised regression.

    Parameters
    ----------
    source, target : ChartSubset
        Subsets of equal dimension.
    hidden : sequence of int, optional
        Hidden tanh widths of both networks.
    config : TrainConfig, optional
        Training hyper-parameters shared by both fits.
    sample_count : int, optional
        Training pairs per direction, drawn uniformly from each subset.
    holdout : int, optional
        Size of the held-out chart grid used for ``fit_eps``.
    seed : int, SeedSequence or Generator, optional
        Seed for samples and initialisation.

    Returns
    -------
    CyclePair

    Raises
    ------
    DivergenceError
        If either fit diverges.
    """
    config = config or TrainConfig()
    diffeo = ground_truth_diffeo(source, target)
    x_seed, y_seed, f_seed, g_seed = spawn_seeds(seed, 4)
    n_src = source.manifold.ambient_dim
    n_dst = target.manifold.ambient_dim

    start = time.perf_counter()
    xs = source.sample_ambient(sample_count, x_seed)
    f_fit = train_regression(mlp(n_src, hidden, n_dst, seed=f_seed), xs, diffeo.forward(xs), config)
    ys = target.sample_ambient(sample_count, y_seed)
    g_fit = train_regression(mlp(n_dst, hidden, n_src, seed=g_seed), ys, diffeo.inverse(ys), config)
    elapsed = time.perf_counter() - start

    hold_x = holdout_points(source, holdout)
    hold_y = holdout_points(target, holdout)
    f_err = max_pointwise_error(f_fit.network, hold_x, diffeo.forward(hold_x))
    g_err = max_pointwise_error(g_fit.network, hold_y, diffeo.inverse(hold_y))
    logger.info(
        "cycle %s -> %s: fit errors %.4g / %.4g in %.1fs",
        source.manifold.name,
        target.manifold.name,
        f_err,
        g_err,
        elapsed,
    )
    return CyclePair(
        forward_net=f_fit.network,
        backward_net=g_fit.network,
        source=source,
        target=target,
        fit_eps=max(f_err, g_err),
        forward_fit_error=f_err,
        backward_fit_error=g_err,
        forward_history=f_fit.loss_history,
        backward_history=g_fit.loss_history,
        training_seconds=elapsed,
    )


def tangential_lipschitz(
    mapping: AmbientMap,
    subset: ChartSubset,
    chart_points: NDArray[np.float64],
    step: float = TANGENT_STEP,
) -> float:
    """
    Largest operator norm of the derivative of ``mapping`` along the subset.

    At each chart point p a g(p)-orthonormal frame F is pushed forward by
    the embedding Jacobian. The columns of J_embed F are orthonormal in
    ambient space, so the spectral norm of D(mapping) J_embed F is the norm
    of the manifold derivative. A :class:`NetworkSpec` contributes its exact
    Jacobians from backpropagation; any other callable is differentiated by
    central differences of ``mapping o embed`` inside the chart with
    ``step``.
    """
    m = subset.manifold
    lower = np.linalg.cholesky(metric_points(m, chart_points))
    frames = np.linalg.inv(lower).transpose(0, 2, 1)
    if isinstance(mapping, NetworkSpec):
        ambient = embed_points(m, chart_points, validate=False)
        tangent = jacobian_points(m, chart_points) @ frames
        derivative = mapping.jacobian_batch(ambient) @ tangent
    else:
        columns = []
        for i in range(m.intrinsic_dim):
            offset = step * frames[:, :, i]
            plus = mapping(embed_points(m, chart_points + offset, validate=False))
            minus = mapping(embed_points(m, chart_points - offset, validate=False))
            columns.append((plus - minus) / (2.0 * step))
        derivative = np.stack(columns, axis=-1)
    return float(np.max(np.linalg.norm(derivative, ord=2, axis=(1, 2))))


@dataclass
class CycleReport:
    """
    Quantities of the composition bound for one pair.

    Attributes
    ----------
    hausdorff_forward : float
        d_H(f_theta(X), f(X)) for a uniform sample X of the source subset.
    hausdorff_backward : float
        d_H(g_phi(Y), g(Y)) for a uniform sample Y of the target subset.
    composition_error_fwd : float
        max ||g_phi(f_theta(x)) - x|| over X.
    composition_error_bwd : float
        max ||f_theta(g_phi(y)) - y|| over Y.
    fit_eps : float
        Held-out fit error of the pair.
    lipschitz_g, lipschitz_f : float
        Sampled maxima of the tangential derivative norms of g_phi on the
        target and f_theta on the source. These are estimates, not bounds.
    bound_fwd : float
        (1 + lipschitz_g) * fit_eps.
    bound_bwd : float
        (1 + lipschitz_f) * fit_eps.
    bound_ok : bool
        Both composition errors within their bounds (plus 1e-9 round-off).
    target_fineness, source_fineness : float
        Net fineness of the reference clouds f(X) and g(Y).
    sample_count : int
        Size of X and Y.
    lipschitz_is_sampled : bool
        Always True; the constant is a sampled estimate.
    """

    hausdorff_forward: float
    hausdorff_backward: float
    composition_error_fwd: float
    composition_error_bwd: float
    fit_eps: float
    lipschitz_g: float
    lipschitz_f: float
    bound_fwd: float
    bound_bwd: float
    bound_ok: bool
    target_fineness: float
    source_fineness: float
    sample_count: int
    lipschitz_is_sampled: bool = True

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def evaluate_cycle(pair: CyclePair, sample_count: int = 1024, seed: SeedLike = None) -> CycleReport:
    """
    Measure the composition errors of a pair against the sampled bound.

    Parameters
    ----------
    pair : CyclePair
        Trained or exact pair.
    sample_count : int, optional
        Uniform samples per subset.
    seed : int, SeedSequence or Generator, optional
        Sampling seed.

    Returns
    -------
    CycleReport
    """
    diffeo = ground_truth_diffeo(pair.source, pair.target)
    x_seed, y_seed = spawn_seeds(seed, 2)
    chart_x = pair.source.sample(sample_count, x_seed)
    chart_y = pair.target.sample(sample_count, y_seed)
    xs = embed_points(pair.source.manifold, chart_x, validate=False)
    ys = embed_points(pair.target.manifold, chart_y, validate=False)
    f, g = pair.forward_net, pair.backward_net

    f_x, g_y = f(xs), g(ys)
    ref_y, ref_x = diffeo.forward(xs), diffeo.inverse(ys)
    comp_fwd = float(np.max(np.linalg.norm(g(f_x) - xs, axis=1)))
    comp_bwd = float(np.max(np.linalg.norm(f(g_y) - ys, axis=1)))
    lip_g = tangential_lipschitz(g, pair.target, chart_y)
    lip_f = tangential_lipschitz(f, pair.source, chart_x)
    bound_fwd = (1.0 + lip_g) * pair.fit_eps
    bound_bwd = (1.0 + lip_f) * pair.fit_eps
    report = CycleReport(
        hausdorff_forward=hausdorff(f_x, ref_y),
        hausdorff_backward=hausdorff(g_y, ref_x),
        composition_error_fwd=comp_fwd,
        composition_error_bwd=comp_bwd,
        fit_eps=pair.fit_eps,
        lipschitz_g=lip_g,
        lipschitz_f=lip_f,
        bound_fwd=bound_fwd,
        bound_bwd=bound_bwd,
        bound_ok=comp_fwd <= bound_fwd + ROUNDOFF and comp_bwd <= bound_bwd + ROUNDOFF,
        target_fineness=net_fineness(ref_y),
        source_fineness=net_fineness(ref_x),
        sample_count=sample_count,
    )
    logger.info(
        "cycle report: composition %.4g <= %.4g (fwd), %.4g <= %.4g (bwd)",
        comp_fwd,
        bound_fwd,
        comp_bwd,
        bound_bwd,
    )
    return report
