"""Explicit matrices of circular convolutions.

For a conv layer with kernel C of shape ``(l, k, s, s)`` on ``k`` channels
of ``m x m`` pixels, the matrix has one row per output entry ``(o, i, j)``
and one column per input entry ``(c, y, x)``, both flattened channel-major.
Row ``(o, i, j)`` holds C[o, c, p, q] in column
``(c, (i t + p) % m, (j t + q) % m)``. A stride t > 1 keeps the rows of the
stride-one matrix at spatial positions that are multiples of t.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import InvalidParameterError, ShapeError
from manifoldlab.neural.layers import Conv2D, ConvTranspose2D, FullyConnected, Layer


@dataclass(eq=False)
class ConvMatrix:
    """
    Dense matrix of a layer's linear part.

    Attributes
    ----------
    matrix : NDArray[np.float64]
        ``(output_dim, input_dim)``; ``(n^2 l, m^2 k)`` for a conv layer.
    source_layer : Layer
        Layer the matrix was built from.
    """

    matrix: NDArray[np.float64]
    source_layer: Layer = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.matrix.shape[0]), int(self.matrix.shape[1]))

    def apply(self, x: ArrayLike) -> NDArray[np.float64]:
        """Matrix-vector product with a vectorised (flattened) input."""
        return self.matrix @ np.asarray(x, dtype=np.float64).ravel()


def _conv_entries(
    kernel: NDArray[np.float64], in_size: int, stride: int
) -> NDArray[np.float64]:
    out_ch, in_ch, s, _ = kernel.shape
    m = in_size
    n = -(-m // stride)
    o, i, j, c, p, q = np.meshgrid(
        np.arange(out_ch),
        np.arange(n),
        np.arange(n),
        np.arange(in_ch),
        np.arange(s),
        np.arange(s),
        indexing="ij",
    )
    rows = (o * n + i) * n + j
    cols = (c * m + (i * stride + p) % m) * m + (j * stride + q) % m
    values = kernel[o, c, p, q]
    matrix = np.zeros((out_ch * n * n, in_ch * m * m))
    np.add.at(matrix, (rows.ravel(), cols.ravel()), values.ravel())
    return matrix


def build_conv_matrix(layer: Layer) -> ConvMatrix:
    """
    Materialise a (transposed) convolution as a dense matrix.

    Parameters
    ----------
    layer : Conv2D or ConvTranspose2D
        Layer whose linear part (before bias and activation) is wanted.

    Returns
    -------
    ConvMatrix
        For a transposed layer, the exact transpose of the matching conv
        layer's matrix.

    Raises
    ------
    InvalidParameterError
        If the layer is not a convolution.

    Examples
    --------
    >>> from manifoldlab.neural import Conv2D
    >>> layer = Conv2D("identity", np.full((1, 1, 1, 1), 3.0), np.zeros(1), 2, 1)
    >>> build_conv_matrix(layer).matrix
    array([[3., 0., 0., 0.],
           [0., 3., 0., 0.],
           [0., 0., 3., 0.],
           [0., 0., 0., 3.]])
    """
    if isinstance(layer, Conv2D):
        return ConvMatrix(_conv_entries(layer.kernel, layer.in_size, layer.stride), layer)
    if isinstance(layer, ConvTranspose2D):
        conv = _conv_entries(layer.kernel, layer.out_size, layer.stride)
        return ConvMatrix(conv.T.copy(), layer)
    raise InvalidParameterError(
        f"build_conv_matrix needs a conv or conv_transpose layer, got {layer.kind}"
    )


def linear_matrix(layer: Layer) -> NDArray[np.float64]:
    """Matrix of any layer's linear part."""
    if isinstance(layer, FullyConnected):
        return layer.matrix.copy()
    return build_conv_matrix(layer).matrix


def delta_kernel(l: int, k: int, s: int) -> NDArray[np.float64]:
    """
    Kronecker-delta witness kernel.

    C[i, j, 0, 0] = 1 when i == j (for i < min(l, k)), all other entries 0.
    With l == k and stride one its conv matrix is the identity.

    Examples
    --------
    >>> C = delta_kernel(2, 2, 3)
    >>> np.argwhere(C).tolist()
    [[0, 0, 0, 0], [1, 1, 0, 0]]
    """
    for name, value in (("l", l), ("k", k), ("s", s)):
        if value < 1:
            raise InvalidParameterError(f"{name} must be >= 1, got {value}")
    kernel = np.zeros((l, k, s, s))
    diag = np.arange(min(l, k))
    kernel[diag, diag, 0, 0] = 1.0
    return kernel


def reads_every_input(in_size: int, kernel_size: int, stride: int) -> bool:
    """
    Whether a strided conv touches every input pixel.

    The offsets ``(i t + p) % m`` for ``i < ceil(m / t)``, ``p < s`` must
    cover all of 0..m-1; otherwise some input column of the matrix is zero
    and the layer cannot be injective for any kernel.
    """
    if kernel_size > in_size:
        raise ShapeError(f"kernel size {kernel_size} exceeds spatial size {in_size}")
    n = -(-in_size // stride)
    hit = (np.arange(n)[:, None] * stride + np.arange(kernel_size)[None, :]) % in_size
    return np.unique(hit).size == in_size
