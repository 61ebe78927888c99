"""
ManifoldLab - numerical laboratory for geometric universality of generative models.

A modular library providing tools for:
- Embedded Riemannian manifolds (pullback metric, Christoffel symbols, volume)
- Geodesic integration and the exponential map
- Surjective generators from the latent cube onto compact manifolds
- Hausdorff distances between point clouds
- From-scratch feedforward networks with (transposed) circular convolutions
- Rank certification of expanding layers
- Cycle-model composition bounds
"""

__version__ = "0.1.0"

from manifoldlab.exceptions import (
    CalculationError,
    InvalidParameterError,
    ManifoldLabError,
)

__all__ = [
    "__version__",
    "ManifoldLabError",
    "InvalidParameterError",
    "CalculationError",
]
