"""Certificates that expanding layers and networks are smooth embeddings."""

from manifoldlab.embedding.checker import (
    EmbeddingVerdict,
    InjectivityReport,
    Verdict,
    check_layer,
    check_network_injectivity,
    check_network_layers,
)
from manifoldlab.embedding.conv_matrix import (
    ConvMatrix,
    build_conv_matrix,
    delta_kernel,
    linear_matrix,
    reads_every_input,
)
from manifoldlab.embedding.rank import RankReport, numeric_rank, rank_is_stable
from manifoldlab.embedding.restricted import (
    LoopWitness,
    RestrictedInjectivity,
    check_restricted_injectivity,
    loop_witness,
)

__all__ = [
    # Matrices
    "ConvMatrix",
    "build_conv_matrix",
    "linear_matrix",
    "delta_kernel",
    "reads_every_input",
    # Rank
    "RankReport",
    "numeric_rank",
    "rank_is_stable",
    # Verdicts
    "Verdict",
    "EmbeddingVerdict",
    "InjectivityReport",
    "check_layer",
    "check_network_layers",
    "check_network_injectivity",
    # Restriction to latent submanifolds
    "RestrictedInjectivity",
    "LoopWitness",
    "check_restricted_injectivity",
    "loop_witness",
]
