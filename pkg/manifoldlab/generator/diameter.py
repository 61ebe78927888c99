"""Riemannian diameter estimate from a k-nearest-neighbour graph.

Geodesic distances are approximated by shortest paths through a k-NN graph
of an area-uniform sample (as in Isomap). The graph approximates from the
chordal side, so the estimate is inflated by a safety factor and never
allowed below the largest chordal distance of the sample.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from manifoldlab.exceptions import ConnectivityError, InvalidParameterError
from manifoldlab.manifolds import EmbeddedManifold, embed_points, sample_uniform
from manifoldlab.manifolds.sampling import SeedLike

logger = logging.getLogger(__name__)

DEFAULT_SAFETY_FACTOR = 1.2
DEFAULT_SOURCE_COUNT = 16
_CDIST_BLOCK = 1024


@dataclass
class DiameterEstimate:
    """
    Upper estimate R0 of the Riemannian diameter.

    Attributes
    ----------
    value : float
        R0 = max(safety_factor * graph_diameter, chordal_bound).
    sample_count : int
        Points in the sample.
    safety_factor : float
        Multiplier applied to the graph diameter.
    graph_diameter : float
        Largest shortest-path distance found from the sources.
    chordal_bound : float
        Largest Euclidean distance between sample points.
    k_neighbors : int
        Neighbours per node in the graph.
    """

    value: float
    sample_count: int
    safety_factor: float
    graph_diameter: float
    chordal_bound: float
    k_neighbors: int


def knn_graph(points: NDArray[np.float64], k_neighbors: int) -> csr_matrix:
    """Symmetric-use k-NN graph with Euclidean edge weights."""
    n_points = points.shape[0]
    distances, indices = cKDTree(points).query(points, k=k_neighbors + 1)
    rows = np.repeat(np.arange(n_points), k_neighbors)
    cols = indices[:, 1:].ravel()
    weights = distances[:, 1:].ravel()
    return csr_matrix((weights, (rows, cols)), shape=(n_points, n_points))


def max_chordal_distance(points: NDArray[np.float64]) -> float:
    """Largest pairwise Euclidean distance, computed block by block."""
    best = 0.0
    for start in range(0, points.shape[0], _CDIST_BLOCK):
        block = cdist(points[start : start + _CDIST_BLOCK], points[start:])
        best = max(best, float(np.max(block)))
    return best


def graph_eccentricity(graph: csr_matrix, source_count: int) -> float:
    """
    Largest shortest-path distance from farthest-point-selected sources.

    The first source is node 0; each next source is the node farthest (in
    graph distance) from all sources chosen so far.
    """
    n_points = graph.shape[0]
    nearest = np.full(n_points, np.inf)
    source = 0
    best = 0.0
    for _ in range(min(source_count, n_points)):
        dist = dijkstra(graph, directed=False, indices=source)
        best = max(best, float(np.max(dist)))
        nearest = np.minimum(nearest, dist)
        source = int(np.argmax(nearest))
    return best


def estimate_diameter(
    manifold: EmbeddedManifold,
    sample_count: int = 2048,
    k_neighbors: int = 10,
    seed: SeedLike = None,
    safety_factor: float = DEFAULT_SAFETY_FACTOR,
    source_count: int = DEFAULT_SOURCE_COUNT,
) -> DiameterEstimate:
    """
    Estimate an upper bound R0 on the Riemannian diameter.

    Parameters
    ----------
    manifold : EmbeddedManifold
        Manifold to measure.
    sample_count : int, optional
        Area-uniform sample size, at least ``10 * k_neighbors``.
    k_neighbors : int, optional
        Graph degree, by default 10.
    seed : int, SeedSequence or Generator, optional
        Sampling seed.
    safety_factor : float, optional
        Inflation of the graph diameter, by default 1.2.
    source_count : int, optional
        Number of shortest-path sources, by default 16.

    Returns
    -------
    DiameterEstimate

    Raises
    ------
    InvalidParameterError
        If ``sample_count < 10 * k_neighbors`` or a parameter is not positive.
    ConnectivityError
        If the k-NN graph is disconnected.

    Examples
    --------
    >>> from manifoldlab.manifolds import get_manifold
    >>> est = estimate_diameter(get_manifold("circle"), 1000, 5, seed=0)
    >>> 3.14 < est.value < 1.2 * 3.1416 * 1.05
    True
    """
    if k_neighbors < 1:
        raise InvalidParameterError(f"k_neighbors must be positive, got {k_neighbors}")
    if sample_count < 10 * k_neighbors:
        raise InvalidParameterError(
            f"sample_count must be >= 10 * k_neighbors ({10 * k_neighbors}), "
            f"got {sample_count}"
        )
    if safety_factor < 1.0:
        raise InvalidParameterError(
            f"safety_factor must be >= 1, got {safety_factor}"
        )

    chart = sample_uniform(manifold, sample_count, seed)
    points = embed_points(manifold, chart, validate=False)
    graph = knn_graph(points, k_neighbors)
    n_components, _ = connected_components(graph, directed=False)
    if n_components > 1:
        raise ConnectivityError(
            f"k-NN graph on {manifold.name} has {n_components} components; "
            f"increase k_neighbors (currently {k_neighbors})"
        )

    graph_diameter = graph_eccentricity(graph, source_count)
    chordal = max_chordal_distance(points)
    value = max(safety_factor * graph_diameter, chordal)
    logger.info(
        "diameter of %s: graph %.6g, chordal %.6g, R0 %.6g",
        manifold.name,
        graph_diameter,
        chordal,
        value,
    )
    return DiameterEstimate(
        value=value,
        sample_count=sample_count,
        safety_factor=safety_factor,
        graph_diameter=graph_diameter,
        chordal_bound=chordal,
        k_neighbors=k_neighbors,
    )
