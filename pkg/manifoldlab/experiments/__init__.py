"""Experiment configs, seeds, runners and reports."""

from manifoldlab.experiments.config import (
    DEFAULTS,
    EXPERIMENTS,
    OUTPUT_DIR_ENV,
    ExperimentConfig,
    experiment_defaults,
)
from manifoldlab.experiments.report import REPORT_FILE, ExperimentReport, TargetCheck
from manifoldlab.experiments.runners import (
    RUNNERS,
    ExperimentInfo,
    list_experiments,
    rk4_error_ratio,
    run_experiment,
)
from manifoldlab.experiments.seeds import stage_int, stage_key, stage_rng, stage_seed

__all__ = [
    # Configuration
    "EXPERIMENTS",
    "DEFAULTS",
    "OUTPUT_DIR_ENV",
    "ExperimentConfig",
    "experiment_defaults",
    # Seeds
    "stage_key",
    "stage_seed",
    "stage_rng",
    "stage_int",
    # Reports
    "REPORT_FILE",
    "ExperimentReport",
    "TargetCheck",
    # Runners
    "RUNNERS",
    "ExperimentInfo",
    "list_experiments",
    "run_experiment",
    "rk4_error_ratio",
]
