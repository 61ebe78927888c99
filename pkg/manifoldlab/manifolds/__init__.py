"""Embedded manifolds: charts, pullback metric, Christoffel symbols, volume."""

from manifoldlab.manifolds.catalog import (
    MANIFOLD_IDS,
    circle,
    clifford_torus,
    doughnut_torus,
    get_manifold,
    list_manifolds,
    sphere,
)
from manifoldlab.manifolds.core import (
    ChristoffelSymbols,
    EmbeddedManifold,
    MetricTensor,
    TangentVector,
)
from manifoldlab.manifolds.differential import (
    christoffel,
    check_metric,
    christoffel_points,
    embed,
    embed_points,
    embedding_jacobian,
    jacobian_points,
    metric,
    metric_points,
    total_volume,
    volume,
    volume_density,
)
from manifoldlab.manifolds.sampling import (
    sample_in_box,
    sample_uniform,
    sobol_points,
    spawn_seeds,
)

__all__ = [
    # Types
    "EmbeddedManifold",
    "TangentVector",
    "MetricTensor",
    "ChristoffelSymbols",
    # Catalog
    "MANIFOLD_IDS",
    "get_manifold",
    "list_manifolds",
    "circle",
    "sphere",
    "clifford_torus",
    "doughnut_torus",
    # Differential geometry
    "embed",
    "embed_points",
    "embedding_jacobian",
    "jacobian_points",
    "metric",
    "metric_points",
    "christoffel",
    "christoffel_points",
    "check_metric",
    "volume",
    "volume_density",
    "total_volume",
    # Sampling
    "sample_in_box",
    "sample_uniform",
    "sobol_points",
    "spawn_seeds",
]
