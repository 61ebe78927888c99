"""
Experiment configuration.

One JSON document describes one experiment run. Missing keys take the
defaults of the named experiment; unknown keys, wrong types and
out-of-range values are collected and reported together in a single
:class:`~manifoldlab.exceptions.ConfigError`.

Examples
--------
>>> cfg = ExperimentConfig.from_dict({"experiment": "universality", "seed": 3})
>>> cfg.manifolds, cfg.hidden, cfg.seed
(['circle'], [64], 3)
>>> ExperimentConfig.from_json(cfg.to_json()) == cfg
True
"""

from __future__ import annotations

import copy
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional, Union

from manifoldlab.exceptions import ConfigError, InvalidParameterError
from manifoldlab.manifolds import MANIFOLD_IDS, get_manifold
from manifoldlab.neural import ActivationKind, TrainConfig

OUTPUT_DIR_ENV = "MANIFOLDLAB_OUTPUT_DIR"
DEFAULT_OUTPUT_ROOT = "runs"

EXPERIMENTS: tuple[str, ...] = (
    "universality",
    "multiclass",
    "embedding-check",
    "cycle",
    "geodesic-audit",
)

SHAPE_GRID_KEYS = ("sizes", "channels", "kernels", "strides")
TRAINING_KEYS = tuple(f.name for f in fields(TrainConfig) if f.name != "seed")
ACTIVATION_NAMES = tuple(k.value for k in ActivationKind)

_COMMON_DEFAULTS: dict[str, Any] = {
    "manifolds": ["circle"],
    "manifold_params": [],
    "hidden": [64],
    "activation": "tanh",
    "training": {},
    "grid_resolution": 2048,
    "sample_count": 2048,
    "epsilon": 0.05,
    "delta": 0.2,
    "class_count": 2,
    "trials": 100,
    "shape_grid": {
        "sizes": [2, 3, 4, 5],
        "channels": [1, 2, 3],
        "kernels": [1, 2, 3],
        "strides": [1, 2],
    },
    "seed": 0,
    "output_dir": None,
}

DEFAULTS: dict[str, dict[str, Any]] = {
    "universality": {
        "seed": 7,
        "training": {"epochs": 3000, "learning_rate": 5e-3, "batch_size": 128},
    },
    "multiclass": {
        "manifolds": ["circle", "circle"],
        "manifold_params": [{"center": [-1.5, 0.0]}, {"center": [1.5, 0.0]}],
        "epsilon": 0.02,
        "delta": 0.2,
        "training": {"epochs": 3000, "learning_rate": 5e-3, "batch_size": 128},
    },
    "embedding-check": {
        # Latent dimension 2, layer widths 8 -> 16 -> 32.
        "hidden": [8, 16, 32],
        "sample_count": 50,
        "trials": 100,
    },
    "cycle": {
        "manifolds": ["circle", "circle"],
        "manifold_params": [{}, {"radius": 2.0}],
        "delta": 0.05,
        "sample_count": 1024,
        "training": {"epochs": 3000, "learning_rate": 5e-3, "batch_size": 128},
    },
    "geodesic-audit": {
        "manifolds": ["circle", "sphere", "clifford-torus"],
        "trials": 20,
        "sample_count": 0,
        "grid_resolution": 0,
    },
}


def experiment_defaults(experiment: str) -> dict[str, Any]:
    """Full default key set of ``experiment``."""
    if experiment not in DEFAULTS:
        raise ConfigError(
            f"experiment must be one of {', '.join(EXPERIMENTS)}, got {experiment!r}",
            ["experiment"],
        )
    merged = copy.deepcopy(_COMMON_DEFAULTS)
    merged.update(copy.deepcopy(DEFAULTS[experiment]))
    merged["experiment"] = experiment
    return merged


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return (isinstance(value, (int, float))) and not isinstance(value, bool)


def _int_list(value: Any, minimum: int) -> bool:
    return (
        isinstance(value, list)
        and len(value) > 0
        and all(_is_int(v) and v >= minimum for v in value)
    )


@dataclass
class ExperimentConfig:
    """
    Normalised experiment configuration.

    Attributes
    ----------
    experiment : str
        One of :data:`EXPERIMENTS`.
    manifolds : list of str
        Catalog manifold ids, in the order the experiment uses them.
    manifold_params : list of dict
        Builder keyword arguments per manifold; empty means catalog defaults.
    hidden : list of int
        Hidden-layer widths (for embedding-check: all layer widths).
    activation : str
        Hidden activation name.
    training : dict
        :class:`~manifoldlab.neural.TrainConfig` fields except ``seed``.
    grid_resolution : int
        Latent grid resolution per axis.
    sample_count : int
        Reference sample size (latent points for embedding-check).
    epsilon : float
        Hausdorff / fit-error target.
    delta : float
        Measure budget of the multiclass gap or the chart-subset deficit.
    class_count : int
        Number of classes for the multiclass experiment.
    trials : int
        Random trials per case.
    shape_grid : dict
        Convolution shape grid with keys sizes, channels, kernels, strides.
    seed : int
        Master seed; stage seeds derive from it.
    output_dir : str, optional
        Artifact directory.
    """

    experiment: str
    manifolds: list[str] = field(default_factory=lambda: ["circle"])
    manifold_params: list[dict[str, Any]] = field(default_factory=list)
    hidden: list[int] = field(default_factory=lambda: [64])
    activation: str = "tanh"
    training: dict[str, Any] = field(default_factory=dict)
    grid_resolution: int = 2048
    sample_count: int = 2048
    epsilon: float = 0.05
    delta: float = 0.2
    class_count: int = 2
    trials: int = 100
    shape_grid: dict[str, list[int]] = field(
        default_factory=lambda: copy.deepcopy(_COMMON_DEFAULTS["shape_grid"])
    )
    seed: int = 0
    output_dir: Optional[str] = None

    # -------------------------------------------------------------------------
    # Construction
    # -------------------------------------------------------------------------

    @classmethod
    def defaults(cls, experiment: str) -> "ExperimentConfig":
        """Default configuration of ``experiment``."""
        return cls.from_dict({"experiment": experiment})

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        """
        Validate and normalise a config mapping.

        Raises
        ------
        ConfigError
            Listing every offending key.
        """
        if not isinstance(data, dict):
            raise ConfigError(
                f"config must be a JSON object, got {type(data).__name__}", ["<root>"]
            )
        known = {f.name for f in fields(cls)}
        problems: list[tuple[str, str]] = [
            (key, "unknown key") for key in sorted(data) if key not in known
        ]
        experiment = data.get("experiment")
        if not isinstance(experiment, str) or experiment not in DEFAULTS:
            problems.insert(
                0, ("experiment", f"must be one of {', '.join(EXPERIMENTS)}, got {experiment!r}")
            )
            detail = "; ".join(f"{key}: {reason}" for key, reason in problems)
            raise ConfigError(f"invalid config: {detail}", [key for key, _ in problems])

        merged = experiment_defaults(experiment)
        merged.update({k: copy.deepcopy(v) for k, v in data.items() if k in known})
        problems.extend(_check(merged))
        if problems:
            detail = "; ".join(f"{key}: {reason}" for key, reason in problems)
            raise ConfigError(f"invalid config: {detail}", [key for key, _ in problems])

        merged["epsilon"] = float(merged["epsilon"])
        merged["delta"] = float(merged["delta"])
        merged["training"] = _normalise_training(merged["training"])
        return cls(**merged)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        """Parse a JSON document."""
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}", ["<root>"]) from e
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """Read a JSON config file."""
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise InvalidParameterError(f"cannot read config {path}: {e}") from e
        return cls.from_json(text)

    # -------------------------------------------------------------------------
    # Serialisation
    # -------------------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        """Plain mapping of every field."""
        return asdict(self)

    def to_json(self) -> str:
        """JSON document with sorted keys."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    # -------------------------------------------------------------------------
    # Derived values
    # -------------------------------------------------------------------------

    def train_config(self, seed: int) -> TrainConfig:
        """Training parameters with a stage seed."""
        return TrainConfig(seed=seed, **self.training)

    def manifold(self, index: int = 0):
        """Build manifold ``index`` with its parameters."""
        params = self.manifold_params[index] if index < len(self.manifold_params) else {}
        return get_manifold(self.manifolds[index], **params)

    def resolve_output_dir(self, override: Optional[Union[str, Path]] = None) -> Path:
        """
        Artifact directory.

        Precedence: ``override`` (the ``--out`` flag), then the
        ``MANIFOLDLAB_OUTPUT_DIR`` environment variable, then
        ``output_dir``, then ``runs/<experiment>``.
        """
        if override is not None:
            return Path(override)
        env = os.environ.get(OUTPUT_DIR_ENV)
        if env:
            return Path(env)
        if self.output_dir:
            return Path(self.output_dir)
        return Path(DEFAULT_OUTPUT_ROOT) / self.experiment


# =============================================================================
# Validation
# =============================================================================


def _check(cfg: dict[str, Any]) -> list[tuple[str, str]]:
    problems: list[tuple[str, str]] = []

    manifolds = cfg["manifolds"]
    if not isinstance(manifolds, list) or not manifolds:
        problems.append(("manifolds", "must be a non-empty list of manifold ids"))
    else:
        unknown = [m for m in manifolds if m not in MANIFOLD_IDS]
        if unknown:
            problems.append(
                ("manifolds", f"unknown ids {unknown}, known: {', '.join(MANIFOLD_IDS)}")
            )

    params = cfg["manifold_params"]
    if not isinstance(params, list) or not all(isinstance(p, dict) for p in params):
        problems.append(("manifold_params", "must be a list of objects"))
    elif params and isinstance(manifolds, list) and len(params) != len(manifolds):
        problems.append(
            ("manifold_params", f"must have {len(manifolds)} entries, got {len(params)}")
        )
    elif isinstance(manifolds, list) and not problems:
        for i, (mid, p) in enumerate(zip(manifolds, params)):
            try:
                get_manifold(mid, **p)
            except (InvalidParameterError, TypeError) as e:
                problems.append((f"manifold_params[{i}]", str(e)))

    if not _int_list(cfg["hidden"], 1):
        problems.append(("hidden", "must be a non-empty list of positive integers"))
    if cfg["activation"] not in ACTIVATION_NAMES:
        problems.append(
            ("activation", f"must be one of {', '.join(ACTIVATION_NAMES)}")
        )

    training = cfg["training"]
    if not isinstance(training, dict):
        problems.append(("training", "must be an object"))
    else:
        extra = sorted(k for k in training if k not in TRAINING_KEYS)
        problems.extend((f"training.{k}", "unknown key") for k in extra)
        if not extra:
            try:
                _normalise_training(training)
                TrainConfig(seed=0, **training)
            except (InvalidParameterError, TypeError, ValueError) as e:
                problems.append(("training", str(e)))

    for key in ("grid_resolution", "sample_count", "trials"):
        if not _is_int(cfg[key]) or cfg[key] < 0:
            problems.append((key, "must be a non-negative integer"))
    if not _is_int(cfg["class_count"]) or cfg["class_count"] < 1:
        problems.append(("class_count", "must be a positive integer"))
    if not _is_int(cfg["seed"]) or cfg["seed"] < 0:
        problems.append(("seed", "must be a non-negative integer"))

    for key in ("epsilon", "delta"):
        if not _is_number(cfg[key]):
            problems.append((key, "must be a number"))
        elif not cfg[key] > 0:
            problems.append((key, f"must be positive, got {cfg[key]}"))

    grid = cfg["shape_grid"]
    if not isinstance(grid, dict) or sorted(grid) != sorted(SHAPE_GRID_KEYS):
        problems.append(("shape_grid", f"must have exactly the keys {', '.join(SHAPE_GRID_KEYS)}"))
    else:
        for key in SHAPE_GRID_KEYS:
            if not _int_list(grid[key], 1):
                problems.append((f"shape_grid.{key}", "must be a non-empty list of positive integers"))

    out = cfg["output_dir"]
    if out is not None and not isinstance(out, str):
        problems.append(("output_dir", "must be a string or null"))
    return problems


def _normalise_training(training: dict[str, Any]) -> dict[str, Any]:
    out = dict(training)
    for key in ("learning_rate", "momentum", "target_loss"):
        if key in out:
            if not _is_number(out[key]):
                raise InvalidParameterError(f"{key} must be a number, got {out[key]!r}")
            out[key] = float(out[key])
    for key in ("epochs", "batch_size", "log_every"):
        if key in out and not _is_int(out[key]):
            raise InvalidParameterError(f"{key} must be an integer, got {out[key]!r}")
    return dict(sorted(out.items()))
