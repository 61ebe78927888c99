"""Layer types: fully connected, circular convolution and its transpose.

Feature tensors are channel-major, shape ``(channels, size, size)``, and
are flattened in C order when passed between layers. Convolutions use
circular padding: spatial offsets wrap around, so a feature map is a
discrete torus. With stride t the output keeps positions 0, t, 2t, ...
and has ``ceil(m / t)`` pixels per side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np
from numpy.typing import NDArray

from manifoldlab.exceptions import InvalidParameterError, ShapeError
from manifoldlab.neural.activations import ActivationKind


def conv_output_size(in_size: int, stride: int) -> int:
    """Spatial output size ceil(m / stride)."""
    return math.ceil(in_size / stride)


def circular_conv(
    x: NDArray[np.float64], kernel: NDArray[np.float64], stride: int
) -> NDArray[np.float64]:
    """
    Circular cross-correlation, batched.

    ``y[b, o, i, j] = sum_{c,p,q} C[o, c, p, q] x[b, c, (i t + p) % m, (j t + q) % m]``

    Parameters
    ----------
    x : NDArray[np.float64]
        Shape ``(B, k, m, m)``.
    kernel : NDArray[np.float64]
        Shape ``(l, k, s, s)``.
    stride : int
        Stride t >= 1.

    Returns
    -------
    NDArray[np.float64]
        Shape ``(B, l, n, n)`` with n = ceil(m / t).
    """
    out_channels, _, size, _ = kernel.shape
    m = x.shape[-1]
    n = conv_output_size(m, stride)
    y = np.zeros((x.shape[0], out_channels, n, n))
    for p in range(size):
        for q in range(size):
            shifted = np.roll(x, shift=(-p, -q), axis=(2, 3))[:, :, ::stride, ::stride]
            y += np.einsum("oc,bcij->boij", kernel[:, :, p, q], shifted)
    return y


def circular_conv_adjoint(
    y: NDArray[np.float64], kernel: NDArray[np.float64], stride: int, in_size: int
) -> NDArray[np.float64]:
    """
    Adjoint of :func:`circular_conv` (the transposed convolution).

    Maps ``(B, l, n, n)`` back to ``(B, k, m, m)`` so that
    ``<conv(x), y> = <x, conv_adjoint(y)>``.
    """
    _, in_channels, size, _ = kernel.shape
    x = np.zeros((y.shape[0], in_channels, in_size, in_size))
    for p in range(size):
        for q in range(size):
            contrib = np.einsum("oc,boij->bcij", kernel[:, :, p, q], y)
            upsampled = np.zeros_like(x)
            upsampled[:, :, ::stride, ::stride] = contrib
            x += np.roll(upsampled, shift=(p, q), axis=(2, 3))
    return x


def circular_conv_kernel_grad(
    x: NDArray[np.float64], grad_y: NDArray[np.float64], stride: int, size: int
) -> NDArray[np.float64]:
    """Gradient of <grad_y, conv(x; C)> with respect to C, shape ``(l, k, s, s)``."""
    grad = np.zeros((grad_y.shape[1], x.shape[1], size, size))
    for p in range(size):
        for q in range(size):
            shifted = np.roll(x, shift=(-p, -q), axis=(2, 3))[:, :, ::stride, ::stride]
            grad[:, :, p, q] = np.einsum("boij,bcij->oc", grad_y, shifted)
    return grad


@dataclass(eq=False)
class Layer:
    """Common interface of all layers. Inputs and outputs are flat batches."""

    kind: ClassVar[str] = "layer"
    activation: ActivationKind

    @property
    def input_shape(self) -> tuple[int, ...]:
        raise NotImplementedError

    @property
    def output_shape(self) -> tuple[int, ...]:
        raise NotImplementedError

    @property
    def input_dim(self) -> int:
        """Flattened input size."""
        return int(np.prod(self.input_shape))

    @property
    def output_dim(self) -> int:
        """Flattened output size."""
        return int(np.prod(self.output_shape))

    @property
    def weights(self) -> NDArray[np.float64]:
        raise NotImplementedError

    @property
    def bias(self) -> NDArray[np.float64]:
        raise NotImplementedError

    def parameters(self) -> list[NDArray[np.float64]]:
        """Parameter arrays in a fixed order: weights, then bias."""
        return [self.weights, self.bias]

    def linear(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Linear part (pre-bias) for a flat batch ``(B, input_dim)``."""
        raise NotImplementedError

    def linear_transpose(self, g: NDArray[np.float64]) -> NDArray[np.float64]:
        """Transpose of the linear part applied to a flat batch ``(B, output_dim)``."""
        raise NotImplementedError

    def weight_gradient(
        self, x: NDArray[np.float64], g: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        """Gradient of sum_b <g_b, linear(x_b)> with respect to the weights."""
        raise NotImplementedError

    def pre_activation(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Affine part: linear(x) + bias, flat."""
        raise NotImplementedError

    def header(self) -> dict[str, Any]:
        """Shape description for checkpoints."""
        raise NotImplementedError

    def copy(self) -> "Layer":
        """Deep copy with independent parameter arrays."""
        raise NotImplementedError


@dataclass(eq=False)
class FullyConnected(Layer):
    """
    Dense layer z -> sigma(A z + b).

    Attributes
    ----------
    matrix : NDArray[np.float64]
        A, shape ``(n, m)``.
    offset : NDArray[np.float64]
        b, shape ``(n,)``.
    """

    kind: ClassVar[str] = "fully_connected"
    matrix: NDArray[np.float64] = field(default_factory=lambda: np.zeros((0, 0)))
    offset: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        self.activation = ActivationKind.parse(self.activation)
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        self.offset = np.asarray(self.offset, dtype=np.float64)
        if self.matrix.ndim != 2 or self.offset.shape != (self.matrix.shape[0],):
            raise ShapeError(
                f"fully connected layer needs A (n, m) and b (n,), got "
                f"{self.matrix.shape} and {self.offset.shape}"
            )

    @property
    def input_shape(self) -> tuple[int, ...]:
        return (self.matrix.shape[1],)

    @property
    def output_shape(self) -> tuple[int, ...]:
        return (self.matrix.shape[0],)

    @property
    def weights(self) -> NDArray[np.float64]:
        return self.matrix

    @property
    def bias(self) -> NDArray[np.float64]:
        return self.offset

    def linear(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return x @ self.matrix.T

    def linear_transpose(self, g: NDArray[np.float64]) -> NDArray[np.float64]:
        return g @ self.matrix

    def weight_gradient(
        self, x: NDArray[np.float64], g: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        return g.T @ x

    def pre_activation(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.linear(x) + self.offset

    def header(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "activation": self.activation.value,
            "in": self.input_dim,
            "out": self.output_dim,
        }

    def copy(self) -> "FullyConnected":
        return FullyConnected(self.activation, self.matrix.copy(), self.offset.copy())


def _check_conv_shapes(kernel: NDArray[np.float64], stride: int, size: int) -> None:
    if kernel.ndim != 4 or kernel.shape[2] != kernel.shape[3]:
        raise ShapeError(f"kernel must have shape (l, k, s, s), got {kernel.shape}")
    if stride < 1:
        raise InvalidParameterError(f"stride must be >= 1, got {stride}")
    if size < 1:
        raise InvalidParameterError(f"spatial size must be positive, got {size}")
    if kernel.shape[2] > size:
        raise ShapeError(
            f"kernel size {kernel.shape[2]} exceeds spatial size {size}"
        )


@dataclass(eq=False)
class Conv2D(Layer):
    """
    Circularly padded convolution z -> sigma(Conv(z) + b).

    Attributes
    ----------
    kernel : NDArray[np.float64]
        C, shape ``(l, k, s, s)``.
    offset : NDArray[np.float64]
        Per-output-channel bias, shape ``(l,)``.
    in_size : int
        Input spatial size m.
    stride : int
        Stride t.
    """

    kind: ClassVar[str] = "conv"
    kernel: NDArray[np.float64] = field(default_factory=lambda: np.zeros((1, 1, 1, 1)))
    offset: NDArray[np.float64] = field(default_factory=lambda: np.zeros(1))
    in_size: int = 1
    stride: int = 1

    def __post_init__(self) -> None:
        self.activation = ActivationKind.parse(self.activation)
        self.kernel = np.asarray(self.kernel, dtype=np.float64)
        self.offset = np.asarray(self.offset, dtype=np.float64)
        _check_conv_shapes(self.kernel, self.stride, self.in_size)
        if self.offset.shape != (self.kernel.shape[0],):
            raise ShapeError(
                f"conv bias must have shape ({self.kernel.shape[0]},), got {self.offset.shape}"
            )

    @property
    def in_channels(self) -> int:
        return int(self.kernel.shape[1])

    @property
    def out_channels(self) -> int:
        return int(self.kernel.shape[0])

    @property
    def kernel_size(self) -> int:
        return int(self.kernel.shape[2])

    @property
    def out_size(self) -> int:
        return conv_output_size(self.in_size, self.stride)

    @property
    def input_shape(self) -> tuple[int, ...]:
        return (self.in_channels, self.in_size, self.in_size)

    @property
    def output_shape(self) -> tuple[int, ...]:
        return (self.out_channels, self.out_size, self.out_size)

    @property
    def weights(self) -> NDArray[np.float64]:
        return self.kernel

    @property
    def bias(self) -> NDArray[np.float64]:
        return self.offset

    def linear(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        tensor = x.reshape((-1,) + self.input_shape)
        return circular_conv(tensor, self.kernel, self.stride).reshape(x.shape[0], -1)

    def linear_transpose(self, g: NDArray[np.float64]) -> NDArray[np.float64]:
        tensor = g.reshape((-1,) + self.output_shape)
        back = circular_conv_adjoint(tensor, self.kernel, self.stride, self.in_size)
        return back.reshape(g.shape[0], -1)

    def weight_gradient(
        self, x: NDArray[np.float64], g: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        return circular_conv_kernel_grad(
            x.reshape((-1,) + self.input_shape),
            g.reshape((-1,) + self.output_shape),
            self.stride,
            self.kernel_size,
        )

    def pre_activation(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        bias = np.repeat(self.offset, self.out_size * self.out_size)
        return self.linear(x) + bias

    def bias_gradient(self, g: NDArray[np.float64]) -> NDArray[np.float64]:
        return g.reshape((-1,) + self.output_shape).sum(axis=(0, 2, 3))

    def header(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "activation": self.activation.value,
            "in_size": self.in_size,
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
            "kernel": self.kernel_size,
            "stride": self.stride,
        }

    def copy(self) -> "Conv2D":
        return Conv2D(
            self.activation, self.kernel.copy(), self.offset.copy(), self.in_size, self.stride
        )


@dataclass(eq=False)
class ConvTranspose2D(Layer):
    """
    Transposed circular convolution: the adjoint of the matching Conv2D.

    The kernel keeps the Conv2D layout ``(l, k, s, s)``; this layer maps
    ``(l, n, n)`` features to ``(k, m, m)`` with n = ceil(m / stride).

    Attributes
    ----------
    kernel : NDArray[np.float64]
        Shape ``(l, k, s, s)``.
    offset : NDArray[np.float64]
        Per-output-channel bias, shape ``(k,)``.
    out_size : int
        Output spatial size m.
    stride : int
        Stride t of the matching convolution.
    """

    kind: ClassVar[str] = "conv_transpose"
    kernel: NDArray[np.float64] = field(default_factory=lambda: np.zeros((1, 1, 1, 1)))
    offset: NDArray[np.float64] = field(default_factory=lambda: np.zeros(1))
    out_size: int = 1
    stride: int = 1

    def __post_init__(self) -> None:
        self.activation = ActivationKind.parse(self.activation)
        self.kernel = np.asarray(self.kernel, dtype=np.float64)
        self.offset = np.asarray(self.offset, dtype=np.float64)
        _check_conv_shapes(self.kernel, self.stride, self.out_size)
        if self.offset.shape != (self.kernel.shape[1],):
            raise ShapeError(
                f"conv_transpose bias must have shape ({self.kernel.shape[1]},), "
                f"got {self.offset.shape}"
            )

    @property
    def in_channels(self) -> int:
        return int(self.kernel.shape[0])

    @property
    def out_channels(self) -> int:
        return int(self.kernel.shape[1])

    @property
    def kernel_size(self) -> int:
        return int(self.kernel.shape[2])

    @property
    def in_size(self) -> int:
        return conv_output_size(self.out_size, self.stride)

    @property
    def input_shape(self) -> tuple[int, ...]:
        return (self.in_channels, self.in_size, self.in_size)

    @property
    def output_shape(self) -> tuple[int, ...]:
        return (self.out_channels, self.out_size, self.out_size)

    @property
    def weights(self) -> NDArray[np.float64]:
        return self.kernel

    @property
    def bias(self) -> NDArray[np.float64]:
        return self.offset

    def matching_conv(self) -> Conv2D:
        """The Conv2D whose adjoint this layer computes."""
        return Conv2D(
            ActivationKind.IDENTITY,
            self.kernel,
            np.zeros(self.in_channels),
            self.out_size,
            self.stride,
        )

    def linear(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        tensor = x.reshape((-1,) + self.input_shape)
        out = circular_conv_adjoint(tensor, self.kernel, self.stride, self.out_size)
        return out.reshape(x.shape[0], -1)

    def linear_transpose(self, g: NDArray[np.float64]) -> NDArray[np.float64]:
        tensor = g.reshape((-1,) + self.output_shape)
        return circular_conv(tensor, self.kernel, self.stride).reshape(g.shape[0], -1)

    def weight_gradient(
        self, x: NDArray[np.float64], g: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        # <g, adj(x; C)> = <conv(g; C), x>
        return circular_conv_kernel_grad(
            g.reshape((-1,) + self.output_shape),
            x.reshape((-1,) + self.input_shape),
            self.stride,
            self.kernel_size,
        )

    def pre_activation(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        bias = np.repeat(self.offset, self.out_size * self.out_size)
        return self.linear(x) + bias

    def bias_gradient(self, g: NDArray[np.float64]) -> NDArray[np.float64]:
        return g.reshape((-1,) + self.output_shape).sum(axis=(0, 2, 3))

    def header(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "activation": self.activation.value,
            "out_size": self.out_size,
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
            "kernel": self.kernel_size,
            "stride": self.stride,
        }

    def copy(self) -> "ConvTranspose2D":
        return ConvTranspose2D(
            self.activation, self.kernel.copy(), self.offset.copy(), self.out_size, self.stride
        )


def bias_gradient(layer: Layer, g: NDArray[np.float64]) -> NDArray[np.float64]:
    """Gradient of sum_b <g_b, pre_activation(x_b)> with respect to the bias."""
    if isinstance(layer, (Conv2D, ConvTranspose2D)):
        return layer.bias_gradient(g)
    return g.sum(axis=0)


def layer_from_header(header: dict[str, Any], weights: NDArray[np.float64], bias: NDArray[np.float64]) -> Layer:
    """Rebuild a layer from its checkpoint header and parameter arrays."""
    kind = header.get("kind")
    activation = ActivationKind.parse(header.get("activation", "identity"))
    if kind == FullyConnected.kind:
        return FullyConnected(activation, weights, bias)
    if kind == Conv2D.kind:
        return Conv2D(activation, weights, bias, int(header["in_size"]), int(header["stride"]))
    if kind == ConvTranspose2D.kind:
        return ConvTranspose2D(
            activation, weights, bias, int(header["out_size"]), int(header["stride"])
        )
    raise InvalidParameterError(f"Unknown layer kind '{kind}'")


def parameter_shapes(header: dict[str, Any]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Weight and bias shapes described by a layer header."""
    kind = header.get("kind")
    if kind == FullyConnected.kind:
        return (int(header["out"]), int(header["in"])), (int(header["out"]),)
    if kind in (Conv2D.kind, ConvTranspose2D.kind):
        l, k, s = (int(header[key]) for key in ("out_channels", "in_channels", "kernel"))
        if kind == Conv2D.kind:
            return (l, k, s, s), (l,)
        # transpose headers name channels from the layer's own point of view
        return (k, l, s, s), (l,)
    raise InvalidParameterError(f"Unknown layer kind '{kind}'")
