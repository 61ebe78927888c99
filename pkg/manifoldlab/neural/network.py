"""Feedforward networks: forward pass, reverse-mode gradients and Jacobians."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import InvalidParameterError, ShapeError
from manifoldlab.manifolds.sampling import SeedLike
from manifoldlab.neural.activations import ActivationKind
from manifoldlab.neural.layers import (
    Conv2D,
    ConvTranspose2D,
    FullyConnected,
    Layer,
    bias_gradient,
)

logger = logging.getLogger(__name__)


@dataclass
class Gradients:
    """
    Reverse-mode gradients of sum_b <output_gradient_b, f(x_b)>.

    Attributes
    ----------
    weights : list of NDArray
        One array per layer, shaped like the layer weights.
    biases : list of NDArray
        One array per layer, shaped like the layer bias.
    inputs : NDArray[np.float64]
        Gradient with respect to the flat inputs, shape ``(B, input_dim)``.
    """

    weights: list[NDArray[np.float64]]
    biases: list[NDArray[np.float64]]
    inputs: NDArray[np.float64]

    def flat(self) -> NDArray[np.float64]:
        """Parameter gradients concatenated in parameter order."""
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.extend([w.ravel(), b.ravel()])
        return np.concatenate(parts) if parts else np.zeros(0)


@dataclass
class ForwardCache:
    """Layer inputs and activations kept for the backward pass."""

    inputs: list[NDArray[np.float64]] = field(default_factory=list)
    outputs: list[NDArray[np.float64]] = field(default_factory=list)


@dataclass(eq=False)
class NetworkSpec:
    """
    Ordered stack of layers.

    Attributes
    ----------
    layers : list of Layer
        Layers applied in order; each layer's flat output size must equal
        the next layer's flat input size.
    input_dim : int
        Flattened input size.
    output_dim : int
        Flattened output size.
    seed : int, optional
        Initialisation seed, recorded in checkpoints.

    Raises
    ------
    ShapeError
        If adjacent layers do not chain.
    """

    layers: list[Layer]
    input_dim: int = 0
    output_dim: int = 0
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.layers:
            raise InvalidParameterError("a network needs at least one layer")
        for i, (a, b) in enumerate(zip(self.layers[:-1], self.layers[1:])):
            if a.output_dim != b.input_dim:
                raise ShapeError(
                    f"layer {i} outputs {a.output_dim} values but layer {i + 1} "
                    f"expects {b.input_dim}"
                )
        first, last = self.layers[0].input_dim, self.layers[-1].output_dim
        if self.input_dim and self.input_dim != first:
            raise ShapeError(f"input_dim {self.input_dim} does not match first layer ({first})")
        if self.output_dim and self.output_dim != last:
            raise ShapeError(f"output_dim {self.output_dim} does not match last layer ({last})")
        self.input_dim, self.output_dim = first, last

    @property
    def parameter_count(self) -> int:
        """Total number of scalar parameters."""
        return sum(p.size for layer in self.layers for p in layer.parameters())

    def parameters(self) -> list[NDArray[np.float64]]:
        """All parameter arrays, weights then bias per layer."""
        return [p for layer in self.layers for p in layer.parameters()]

    def flat_parameters(self) -> NDArray[np.float64]:
        """Parameters concatenated in :meth:`parameters` order."""
        return np.concatenate([p.ravel() for p in self.parameters()])

    def set_flat_parameters(self, values: ArrayLike) -> None:
        """Overwrite all parameters in place from a flat vector."""
        flat = np.asarray(values, dtype=np.float64).ravel()
        if flat.size != self.parameter_count:
            raise ShapeError(
                f"expected {self.parameter_count} parameter values, got {flat.size}"
            )
        offset = 0
        for p in self.parameters():
            p[...] = flat[offset : offset + p.size].reshape(p.shape)
            offset += p.size

    def copy(self) -> "NetworkSpec":
        """Deep copy."""
        return NetworkSpec([layer.copy() for layer in self.layers], seed=self.seed)

    def header(self) -> dict[str, Any]:
        """JSON-compatible architecture description."""
        return {
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "seed": self.seed,
            "layers": [layer.header() for layer in self.layers],
        }

    def _as_batch(self, x: ArrayLike) -> tuple[NDArray[np.float64], bool]:
        arr = np.asarray(x, dtype=np.float64)
        in_shape = self.layers[0].input_shape
        if arr.shape == in_shape or (arr.ndim == 1 and arr.size == self.input_dim):
            return arr.reshape(1, -1), True
        if arr.ndim >= 2 and int(np.prod(arr.shape[1:])) == self.input_dim and (
            arr.ndim == 2 or arr.shape[1:] == in_shape
        ):
            return arr.reshape(arr.shape[0], -1), False
        raise ShapeError(
            f"network expects inputs of size {self.input_dim} (shape {in_shape}), "
            f"got array of shape {arr.shape}"
        )

    def forward_cached(self, x: NDArray[np.float64]) -> tuple[NDArray[np.float64], ForwardCache]:
        """Forward pass on a flat batch, keeping what backward needs."""
        cache = ForwardCache()
        a = x
        for layer in self.layers:
            cache.inputs.append(a)
            a = layer.activation.apply(layer.pre_activation(a))
            cache.outputs.append(a)
        return a, cache

    def forward(self, x: ArrayLike) -> NDArray[np.float64]:
        """
        Evaluate the network.

        Parameters
        ----------
        x : array_like
            One input (flat or shaped like the first layer's input) or a
            batch of them.

        Returns
        -------
        NDArray[np.float64]
            Flat outputs, shape ``(output_dim,)`` or ``(B, output_dim)``.

        Raises
        ------
        ShapeError
            If the input size does not match ``input_dim``.

        Examples
        --------
        >>> net = NetworkSpec([FullyConnected("identity", np.eye(2), np.zeros(2))])
        >>> net.forward([3.0, -1.0])
        array([ 3., -1.])
        """
        batch, single = self._as_batch(x)
        out, _ = self.forward_cached(batch)
        return out[0] if single else out

    __call__ = forward

    def backward_cached(
        self, cache: ForwardCache, output_gradient: NDArray[np.float64]
    ) -> Gradients:
        """Backward pass from a cache produced by :meth:`forward_cached`."""
        weights: list[NDArray[np.float64]] = []
        biases: list[NDArray[np.float64]] = []
        g = output_gradient
        for layer, a_in, a_out in zip(
            reversed(self.layers), reversed(cache.inputs), reversed(cache.outputs)
        ):
            g = g * layer.activation.derivative_from_output(a_out)
            weights.append(layer.weight_gradient(a_in, g))
            biases.append(bias_gradient(layer, g))
            g = layer.linear_transpose(g)
        weights.reverse()
        biases.reverse()
        return Gradients(weights=weights, biases=biases, inputs=g)

    def backward(self, x: ArrayLike, output_gradient: ArrayLike) -> Gradients:
        """
        Reverse-mode gradients of sum_b <output_gradient_b, f(x_b)>.

        Raises
        ------
        ShapeError
            If ``output_gradient`` does not match the output batch.
        """
        batch, _ = self._as_batch(x)
        grad = np.asarray(output_gradient, dtype=np.float64).reshape(batch.shape[0], -1)
        if grad.shape[1] != self.output_dim:
            raise ShapeError(
                f"output gradient must have {self.output_dim} columns, got {grad.shape[1]}"
            )
        _, cache = self.forward_cached(batch)
        return self.backward_cached(cache, grad)

    def jacobian(self, x: ArrayLike) -> NDArray[np.float64]:
        """
        Jacobian df/dx at one input, shape ``(output_dim, input_dim)``.

        Row r is the input gradient for the unit output gradient e_r; all
        rows come from a single batched backward pass.
        """
        batch, single = self._as_batch(x)
        if not single and batch.shape[0] != 1:
            raise ShapeError("jacobian takes a single input; use jacobian_batch")
        return self.jacobian_batch(batch)[0]

    def jacobian_batch(self, x: ArrayLike) -> NDArray[np.float64]:
        """Jacobians at a batch of inputs, shape ``(B, output_dim, input_dim)``."""
        batch, _ = self._as_batch(x)
        n_out = self.output_dim
        repeated = np.repeat(batch, n_out, axis=0)
        unit = np.tile(np.eye(n_out), (batch.shape[0], 1))
        _, cache = self.forward_cached(repeated)
        grads = self.backward_cached(cache, unit)
        return grads.inputs.reshape(batch.shape[0], n_out, self.input_dim)


LayerDescription = Union[Layer, dict[str, Any]]


def _uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> NDArray[np.float64]:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, shape)


def init_fully_connected(
    in_dim: int, out_dim: int, activation: "str | ActivationKind", rng: np.random.Generator
) -> FullyConnected:
    """Dense layer with weights uniform in +-1/sqrt(in_dim) and zero bias."""
    if in_dim < 1 or out_dim < 1:
        raise InvalidParameterError(
            f"layer sizes must be positive, got {in_dim} -> {out_dim}"
        )
    return FullyConnected(
        ActivationKind.parse(activation), _uniform(rng, (out_dim, in_dim), in_dim), np.zeros(out_dim)
    )


def init_conv(
    in_size: int,
    in_channels: int,
    out_channels: int,
    kernel_size: int,
    stride: int,
    activation: "str | ActivationKind",
    rng: np.random.Generator,
) -> Conv2D:
    """Conv layer with kernel uniform in +-1/sqrt(k s^2) and zero bias."""
    shape = (out_channels, in_channels, kernel_size, kernel_size)
    kernel = _uniform(rng, shape, in_channels * kernel_size * kernel_size)
    return Conv2D(ActivationKind.parse(activation), kernel, np.zeros(out_channels), in_size, stride)


def init_conv_transpose(
    out_size: int,
    in_channels: int,
    out_channels: int,
    kernel_size: int,
    stride: int,
    activation: "str | ActivationKind",
    rng: np.random.Generator,
) -> ConvTranspose2D:
    """Transposed conv layer mapping ``in_channels`` to ``out_channels`` maps."""
    shape = (in_channels, out_channels, kernel_size, kernel_size)
    kernel = _uniform(rng, shape, in_channels * kernel_size * kernel_size)
    return ConvTranspose2D(
        ActivationKind.parse(activation), kernel, np.zeros(out_channels), out_size, stride
    )


def mlp(
    input_dim: int,
    hidden: Sequence[int],
    output_dim: int,
    activation: "str | ActivationKind" = ActivationKind.TANH,
    output_activation: "str | ActivationKind" = ActivationKind.IDENTITY,
    seed: SeedLike = None,
) -> NetworkSpec:
    """
    Fully connected network with seeded initialisation.

    Parameters
    ----------
    input_dim, output_dim : int
        Input and output sizes.
    hidden : sequence of int
        Hidden layer widths.
    activation : str or ActivationKind, optional
        Hidden activation (default tanh).
    output_activation : str or ActivationKind, optional
        Output activation (default identity).
    seed : int, SeedSequence or Generator, optional
        Initialisation seed.

    Returns
    -------
    NetworkSpec
    """
    rng = np.random.default_rng(seed)
    sizes = [input_dim, *hidden, output_dim]
    layers: list[Layer] = []
    for i, (a, b) in enumerate(zip(sizes[:-1], sizes[1:])):
        act = output_activation if i == len(sizes) - 2 else activation
        layers.append(init_fully_connected(a, b, act, rng))
    return NetworkSpec(layers, seed=seed if isinstance(seed, int) else None)


def build_network(
    input_dim: int, architecture: Sequence[LayerDescription], seed: SeedLike = None
) -> NetworkSpec:
    """
    Build a network from layer descriptions.

    Each description is a ready :class:`Layer` or a dict with ``kind``
    (``fully_connected``, ``conv`` or ``conv_transpose``) and
    ``activation``. Dense layers take ``out``; conv layers take
    ``channels``, ``kernel`` and ``stride``. Conv layers read their input
    as a square image whose channel count and size follow from the
    previous layer (or ``in_channels`` / ``size`` in the description).

    Raises
    ------
    InvalidParameterError
        On an unknown kind or missing field.
    ShapeError
        When a conv layer cannot interpret its input as square images.
    """
    rng = np.random.default_rng(seed)
    layers: list[Layer] = []
    shape: tuple[int, ...] = (input_dim,)
    for i, desc in enumerate(architecture):
        if isinstance(desc, Layer):
            layer = desc
        else:
            try:
                layer = _layer_from_description(desc, shape, rng)
            except KeyError as e:
                raise InvalidParameterError(f"layer {i} is missing field {e}") from None
        layers.append(layer)
        shape = layer.output_shape
    return NetworkSpec(layers, seed=seed if isinstance(seed, int) else None)


def _layer_from_description(
    desc: dict[str, Any], shape: tuple[int, ...], rng: np.random.Generator
) -> Layer:
    kind = desc["kind"]
    activation = desc.get("activation", "tanh")
    size = int(np.prod(shape))
    if kind == FullyConnected.kind:
        return init_fully_connected(size, int(desc["out"]), activation, rng)
    if kind not in (Conv2D.kind, ConvTranspose2D.kind):
        raise InvalidParameterError(f"Unknown layer kind '{kind}'")
    channels = int(desc.get("in_channels", shape[0] if len(shape) == 3 else 1))
    side = desc.get("size")
    if side is None:
        side = int(round(np.sqrt(size / channels)))
    side = int(side)
    if channels * side * side != size:
        raise ShapeError(
            f"cannot read {size} values as {channels} channels of {side}x{side} images"
        )
    stride = int(desc.get("stride", 1))
    if kind == Conv2D.kind:
        return init_conv(
            side, channels, int(desc["channels"]), int(desc["kernel"]), stride, activation, rng
        )
    out_size = int(desc.get("out_size", side * stride))
    return init_conv_transpose(
        out_size, channels, int(desc["channels"]), int(desc["kernel"]), stride, activation, rng
    )
