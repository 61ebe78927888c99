"""Chart subsets, ground-truth diffeomorphisms and trained cycle pairs."""

from manifoldlab.cycle.lab import (
    CyclePair,
    CycleReport,
    evaluate_cycle,
    exact_pair,
    holdout_points,
    tangential_lipschitz,
    train_cycle,
)
from manifoldlab.cycle.subsets import (
    ChartSubset,
    GroundTruthDiffeo,
    build_chart_subset,
    build_matched_subsets,
    ground_truth_diffeo,
)

__all__ = [
    "ChartSubset",
    "GroundTruthDiffeo",
    "build_chart_subset",
    "build_matched_subsets",
    "ground_truth_diffeo",
    "CyclePair",
    "CycleReport",
    "exact_pair",
    "holdout_points",
    "train_cycle",
    "evaluate_cycle",
    "tangential_lipschitz",
]
