"""Smooth activation functions."""

from __future__ import annotations

from enum import Enum

import numpy as np
from numpy.typing import NDArray

from manifoldlab.exceptions import InvalidParameterError


class ActivationKind(str, Enum):
    """
    Elementwise activation.

    ``tanh`` and ``sigmoid`` are nonconstant, bounded and continuous, and
    smooth monotone with a nonvanishing derivative. ``identity`` is smooth
    monotone but unbounded.
    """

    TANH = "tanh"
    SIGMOID = "sigmoid"
    IDENTITY = "identity"

    @classmethod
    def parse(cls, value: "str | ActivationKind") -> "ActivationKind":
        """Look up an activation by name."""
        if isinstance(value, ActivationKind):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise InvalidParameterError(
                f"Unknown activation '{value}'. Available: {names}"
            ) from None

    def apply(self, z: NDArray[np.float64]) -> NDArray[np.float64]:
        """sigma(z)."""
        if self is ActivationKind.TANH:
            return np.tanh(z)
        if self is ActivationKind.SIGMOID:
            return 0.5 * (1.0 + np.tanh(0.5 * z))
        return np.asarray(z, dtype=np.float64).copy()

    def derivative_from_output(self, a: NDArray[np.float64]) -> NDArray[np.float64]:
        """sigma'(z) expressed through a = sigma(z)."""
        if self is ActivationKind.TANH:
            return 1.0 - a * a
        if self is ActivationKind.SIGMOID:
            return a * (1.0 - a)
        return np.ones_like(a)

    def derivative(self, z: NDArray[np.float64]) -> NDArray[np.float64]:
        """sigma'(z)."""
        return self.derivative_from_output(self.apply(z))

    @property
    def output_range(self) -> tuple[float, float]:
        """Open interval containing every output."""
        if self is ActivationKind.TANH:
            return (-1.0, 1.0)
        if self is ActivationKind.SIGMOID:
            return (0.0, 1.0)
        return (-np.inf, np.inf)

    @property
    def bounded(self) -> bool:
        """Whether outputs lie in a bounded interval."""
        return self is not ActivationKind.IDENTITY

    @property
    def smooth_monotone(self) -> bool:
        """Smooth, strictly monotone, derivative never zero."""
        return True
