"""Latent-cube surjections onto manifolds and the multiclass slab construction."""

from manifoldlab.generator.diameter import (
    DiameterEstimate,
    estimate_diameter,
    knn_graph,
    max_chordal_distance,
)
from manifoldlab.generator.multiclass import (
    FaceContinuity,
    MulticlassMap,
    SlabPartition,
    build_multiclass_map,
    build_multiclass_partition,
    face_continuity,
)
from manifoldlab.generator.surjection import (
    GeneratorMap,
    SurjectivityResult,
    build_generator,
    check_cube_contains_ball,
    latent_grid,
    orthonormal_frame,
    surjectivity_check,
    verify_surjectivity,
)

__all__ = [
    # Diameter
    "DiameterEstimate",
    "estimate_diameter",
    "knn_graph",
    "max_chordal_distance",
    # Single-class generator
    "GeneratorMap",
    "SurjectivityResult",
    "build_generator",
    "orthonormal_frame",
    "check_cube_contains_ball",
    "latent_grid",
    "surjectivity_check",
    "verify_surjectivity",
    # Multiclass
    "SlabPartition",
    "MulticlassMap",
    "FaceContinuity",
    "build_multiclass_partition",
    "build_multiclass_map",
    "face_continuity",
]
