"""Finite-difference checks of reverse-mode gradients and Jacobians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.manifolds.sampling import SeedLike
from manifoldlab.neural.network import NetworkSpec

DEFAULT_STEP = 1e-5


def relative_error(a: NDArray[np.float64], b: NDArray[np.float64]) -> float:
    """||a - b|| / max(||a|| + ||b||, 1e-12)."""
    denom = max(float(np.linalg.norm(a) + np.linalg.norm(b)), 1e-12)
    return float(np.linalg.norm(a - b)) / denom


@dataclass
class GradientCheck:
    """
    Outcome of a gradient check.

    Attributes
    ----------
    parameter_error : float
        Relative error of the parameter gradient.
    input_error : float
        Relative error of the input gradient.
    """

    parameter_error: float
    input_error: float

    @property
    def max_error(self) -> float:
        return max(self.parameter_error, self.input_error)


def numeric_parameter_gradient(
    net: NetworkSpec,
    x: NDArray[np.float64],
    output_gradient: NDArray[np.float64],
    step: float = DEFAULT_STEP,
) -> NDArray[np.float64]:
    """Central differences of sum <output_gradient, f(x)> over every parameter."""
    perturbed = net.copy()
    theta = perturbed.flat_parameters()
    grad = np.empty_like(theta)
    for i in range(theta.size):
        saved = theta[i]
        theta[i] = saved + step
        perturbed.set_flat_parameters(theta)
        plus = float(np.sum(output_gradient * perturbed.forward(x)))
        theta[i] = saved - step
        perturbed.set_flat_parameters(theta)
        minus = float(np.sum(output_gradient * perturbed.forward(x)))
        theta[i] = saved
        grad[i] = (plus - minus) / (2.0 * step)
    return grad


def numeric_jacobian(
    net: NetworkSpec, x: ArrayLike, step: float = DEFAULT_STEP
) -> NDArray[np.float64]:
    """Central-difference Jacobian at one input, shape ``(output_dim, input_dim)``."""
    point = np.asarray(x, dtype=np.float64).ravel()
    offsets = step * np.eye(point.size)
    plus = net.forward(point + offsets)
    minus = net.forward(point - offsets)
    return ((plus - minus) / (2.0 * step)).T


def gradient_check(
    net: NetworkSpec,
    x: ArrayLike,
    seed: SeedLike = None,
    step: float = DEFAULT_STEP,
) -> GradientCheck:
    """
    Compare :meth:`NetworkSpec.backward` with central differences.

    A random output gradient is drawn; both the parameter gradient and the
    input gradient of <output_gradient, f(x)> are checked.

    Parameters
    ----------
    net : NetworkSpec
        Network to check (not modified).
    x : array_like
        One input or a batch.
    seed : int, SeedSequence or Generator, optional
        Seed for the random output gradient.
    step : float, optional
        Finite-difference step (default 1e-5).

    Returns
    -------
    GradientCheck
    """
    rng = np.random.default_rng(seed)
    batch, _ = net._as_batch(x)
    out_grad = rng.standard_normal((batch.shape[0], net.output_dim))
    analytic = net.backward(batch, out_grad)

    numeric_params = numeric_parameter_gradient(net, batch, out_grad, step)
    numeric_inputs = np.stack(
        [out_grad[b] @ numeric_jacobian(net, batch[b], step) for b in range(batch.shape[0])]
    )
    return GradientCheck(
        parameter_error=relative_error(analytic.flat(), numeric_params),
        input_error=relative_error(analytic.inputs, numeric_inputs),
    )
