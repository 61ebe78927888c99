"""Tests for experiments module."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from manifoldlab.exceptions import CalculationError, ConfigError, InvalidParameterError
from manifoldlab.experiments import (
    EXPERIMENTS,
    OUTPUT_DIR_ENV,
    ExperimentConfig,
    ExperimentReport,
    TargetCheck,
    experiment_defaults,
    list_experiments,
    rk4_error_ratio,
    run_experiment,
    stage_int,
    stage_key,
    stage_rng,
    stage_seed,
)


def tiny(experiment: str, **overrides) -> ExperimentConfig:
    """Config small enough to run in a unit test."""
    data = {
        "experiment": experiment,
        "hidden": [8],
        "grid_resolution": 16,
        "sample_count": 64,
        "trials": 2,
        "training": {"epochs": 5, "learning_rate": 1e-2, "batch_size": 32},
    }
    data.update(overrides)
    return ExperimentConfig.from_dict(data)


class TestExperimentConfig:
    """Tests for config validation and defaults."""

    def test_defaults(self):
        """Test missing keys take the experiment defaults."""
        cfg = ExperimentConfig.from_dict({"experiment": "cycle"})
        assert cfg.manifolds == ["circle", "circle"]
        assert cfg.manifold_params == [{}, {"radius": 2.0}]
        assert cfg.delta == 0.05
        assert cfg.seed == 0

    def test_every_experiment_has_defaults(self):
        """Test each catalog experiment validates with defaults only."""
        for name in EXPERIMENTS:
            assert ExperimentConfig.defaults(name).experiment == name

    def test_unknown_experiment(self):
        """Test an unknown experiment name is reported."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"experiment": "nope"})
        assert exc_info.value.offending_keys == ["experiment"]
        with pytest.raises(ConfigError):
            experiment_defaults("nope")

    def test_collects_every_problem(self):
        """Test all offending keys are reported together."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict(
                {"experiment": "cycle", "bogus": 1, "epsilon": -1.0, "hidden": []}
            )
        keys = exc_info.value.offending_keys
        assert {"bogus", "epsilon", "hidden"} <= set(keys)
        assert "offending keys" in str(exc_info.value)

    def test_training_unknown_key(self):
        """Test unknown training keys are named with their prefix."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"experiment": "universality", "training": {"lr": 1}})
        assert exc_info.value.offending_keys == ["training.lr"]

    def test_training_bad_value(self):
        """Test invalid training values are reported."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict(
                {"experiment": "universality", "training": {"learning_rate": -1.0}}
            )
        assert exc_info.value.offending_keys == ["training"]

    def test_unknown_manifold(self):
        """Test unknown manifold ids are reported."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"experiment": "universality", "manifolds": ["klein"]})
        assert "manifolds" in exc_info.value.offending_keys

    def test_bad_manifold_params(self):
        """Test builder errors are reported per manifold."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict(
                {
                    "experiment": "universality",
                    "manifolds": ["circle"],
                    "manifold_params": [{"radius": -1.0}],
                }
            )
        assert exc_info.value.offending_keys == ["manifold_params[0]"]

    def test_bool_is_not_int(self):
        """Test booleans are rejected where integers are expected."""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"experiment": "universality", "seed": True})

    def test_config_error_is_invalid_parameter(self):
        """Test ConfigError subclasses InvalidParameterError."""
        with pytest.raises(InvalidParameterError):
            ExperimentConfig.from_dict({"experiment": "cycle", "delta": 0})

    def test_not_json(self):
        """Test malformed JSON raises ConfigError."""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json("{not json")

    def test_not_object(self):
        """Test a JSON array raises ConfigError."""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json("[1, 2]")

    def test_json_round_trip(self):
        """Test to_json then from_json reproduces the config."""
        cfg = tiny("multiclass", seed=11)
        assert ExperimentConfig.from_json(cfg.to_json()) == cfg

    def test_load_missing_file(self, tmp_path):
        """Test an unreadable file raises."""
        with pytest.raises(InvalidParameterError):
            ExperimentConfig.load(tmp_path / "missing.json")

    def test_train_config(self):
        """Test the training dict becomes a TrainConfig with the stage seed."""
        train = tiny("universality").train_config(42)
        assert train.seed == 42
        assert train.epochs == 5

    @pytest.mark.parametrize(
        "path", sorted((Path(__file__).parents[2] / "configs").glob("*.json")), ids=lambda p: p.name
    )
    def test_shipped_configs_validate(self, path):
        """Test every example config in configs/ loads."""
        assert ExperimentConfig.load(path).experiment in EXPERIMENTS

    def test_manifold_params_applied(self):
        """Test manifold builders receive their parameters."""
        cfg = ExperimentConfig.defaults("cycle")
        assert cfg.manifold(1).name == "circle(r=2)"


class TestOutputDir:
    """Tests for output directory precedence."""

    def test_default(self, isolated_output):
        """Test runs/<experiment> is the fallback."""
        cfg = ExperimentConfig.defaults("cycle")
        assert cfg.resolve_output_dir() == Path("runs") / "cycle"

    def test_config_value(self, isolated_output):
        """Test output_dir is used when set."""
        cfg = ExperimentConfig.from_dict({"experiment": "cycle", "output_dir": "out/here"})
        assert cfg.resolve_output_dir() == Path("out/here")

    def test_environment_beats_config(self, monkeypatch):
        """Test the environment variable overrides output_dir."""
        monkeypatch.setenv(OUTPUT_DIR_ENV, "from-env")
        cfg = ExperimentConfig.from_dict({"experiment": "cycle", "output_dir": "out/here"})
        assert cfg.resolve_output_dir() == Path("from-env")

    def test_override_beats_environment(self, monkeypatch):
        """Test the --out override wins."""
        monkeypatch.setenv(OUTPUT_DIR_ENV, "from-env")
        cfg = ExperimentConfig.defaults("cycle")
        assert cfg.resolve_output_dir("flag") == Path("flag")


class TestSeeds:
    """Tests for per-stage seeds."""

    def test_deterministic(self):
        """Test equal inputs give equal streams."""
        assert stage_rng(3, "train").random() == stage_rng(3, "train").random()
        assert stage_int(3, "train") == stage_int(3, "train")

    def test_stages_differ(self):
        """Test distinct stages give distinct streams."""
        assert stage_key("train") != stage_key("init")
        assert stage_rng(3, "train").random() != stage_rng(3, "init").random()

    def test_master_seed_differs(self):
        """Test distinct master seeds give distinct streams."""
        a = stage_seed(1, "train").generate_state(2)
        b = stage_seed(2, "train").generate_state(2)
        assert not np.array_equal(a, b)

    def test_int_range(self):
        """Test plain int seeds fit in 31 bits."""
        assert 0 <= stage_int(0, "x") < 2**31


class TestReport:
    """Tests for ExperimentReport and TargetCheck."""

    @pytest.mark.parametrize(
        "op, passed", [("<", True), ("<=", True), (">", False), (">=", False), ("==", False)]
    )
    def test_target_ops(self, op, passed):
        """Test each comparison operator."""
        assert TargetCheck.evaluate("x", 0.01, op, 0.05).passed is passed

    def test_non_finite_fails(self):
        """Test a NaN value never passes."""
        assert not TargetCheck.evaluate("x", math.nan, "<", 1.0).passed

    def test_unknown_op(self):
        """Test an unknown operator raises."""
        with pytest.raises(InvalidParameterError):
            TargetCheck.evaluate("x", 1.0, "!=", 1.0)

    def test_passed(self):
        """Test the report passes only when every target passes."""
        report = ExperimentReport("cycle", {})
        report.add_target("a", 1.0, "<", 2.0)
        assert report.passed
        report.add_target("b", 3.0, "<", 2.0)
        assert not report.passed
        assert [t.name for t in report.failed_targets()] == ["b"]
        assert report.metrics == {"a": 1.0, "b": 3.0}

    def test_non_finite_metric(self):
        """Test non-finite metrics cannot be serialised."""
        report = ExperimentReport("cycle", {})
        report.add_metric("bad", math.inf)
        with pytest.raises(CalculationError):
            report.to_dict()

    def test_write_and_load(self, tmp_path):
        """Test report.json round trip."""
        report = ExperimentReport("cycle", {"seed": 0})
        report.add_target("fit_eps", 0.01, "<", 0.05)
        report.timings["training"] = 1.5
        path = report.write(tmp_path / "run")
        assert path.name == "report.json"
        back = ExperimentReport.load(path)
        assert back.to_dict() == report.to_dict()
        assert json.loads(path.read_text(encoding="utf-8"))["passed"] is True


class TestCatalog:
    """Tests for the experiment catalog."""

    def test_list_experiments(self):
        """Test five experiments in catalog order."""
        infos = list_experiments()
        assert [i.name for i in infos] == list(EXPERIMENTS)
        assert all(i.description and i.certifies for i in infos)


class TestRunners:
    """Tests for experiment runners on tiny configs."""

    def test_rk4_ratio(self):
        """Test the RK4 error ratio is near 16."""
        assert 12.0 <= rk4_error_ratio() <= 20.0

    def test_geodesic_audit(self, tmp_path):
        """Test the audit compares numeric and closed-form maps."""
        cfg = tiny("geodesic-audit", manifolds=["circle", "sphere"])
        report = run_experiment(cfg, tmp_path)
        assert report.metrics["circle_exp_error"] < 1e-5
        assert "sphere_speed_drift" in report.metrics
        checks = {t.name: t for t in report.targets}
        assert checks["rk4_ratio_min"].passed
        assert checks["rk4_ratio_max"].passed
        assert (tmp_path / "report.json").exists()
        assert (tmp_path / "report.md").exists()

    def test_geodesic_audit_skips_torus(self, tmp_path):
        """Test manifolds without a closed form are skipped with a warning."""
        cfg = tiny("geodesic-audit", manifolds=["torus3"])
        with pytest.warns(UserWarning, match="closed-form"):
            report = run_experiment(cfg, tmp_path)
        assert report.details["skipped"] == ["torus3"]
        assert "exp_error_max" not in report.metrics

    def test_embedding_check(self, tmp_path):
        """Test conv matrices and witness kernels on a small shape grid."""
        cfg = tiny(
            "embedding-check",
            hidden=[4, 8],
            sample_count=10,
            shape_grid={"sizes": [3], "channels": [1, 2], "kernels": [1, 2], "strides": [1, 2]},
        )
        report = run_experiment(cfg, tmp_path)
        checks = {t.name: t for t in report.targets}
        assert report.metrics["conv_cases"] == 16
        for name in (
            "conv_matrix_max_error",
            "transpose_duality_mismatches",
            "witness_failures",
            "not_expanding_missed",
            "non_expanding_detected",
        ):
            assert checks[name].passed, name
        assert (tmp_path / "network.mlnet").exists()

    def test_embedding_check_gates_strided_shapes(self, tmp_path):
        """Test strided expanding shapes with a full-rank draw are gated on redraws."""
        cfg = tiny(
            "embedding-check",
            hidden=[4, 8],
            sample_count=10,
            trials=20,
            shape_grid={"sizes": [3, 5], "channels": [1, 3], "kernels": [2, 3], "strides": [2]},
        )
        report = run_experiment(cfg, tmp_path)
        checks = {t.name: t for t in report.targets}
        assert checks["generic_deficient_trials"].passed
        assert checks["generic_deficient_trials"].value == 0
        assert sorted(report.details["generic_certified"]) == [
            [3, 1, 3, 2, 2],
            [3, 1, 3, 3, 2],
            [5, 1, 3, 3, 2],
        ]
        uncertified = [case["shape"] for case in report.details["uncertified_expanding"]]
        assert uncertified == [[5, 1, 3, 2, 2]]

    def test_universality(self, tmp_path):
        """Test a short universality run writes its artifacts."""
        report = run_experiment(tiny("universality"), tmp_path)
        assert report.metrics["R0"] == pytest.approx(math.pi)
        assert report.metrics["epochs_run"] == 5
        assert len(report.details["loss_history"]) == 6
        for name in ("network.mlnet", "reference.csv", "generated.csv", "construction.csv"):
            assert name in report.artifacts
            assert (tmp_path / name).exists()
        assert set(report.timings) == {"diameter", "construction", "training", "evaluation", "artifacts"}

    def test_multiclass(self, tmp_path):
        """Test the gap measure is exactly delta / 2."""
        report = run_experiment(tiny("multiclass", grid_resolution=32), tmp_path)
        checks = {t.name: t for t in report.targets}
        assert checks["gap_measure"].passed
        assert checks["gap_measure_exact"].passed
        assert checks["face_continuous"].passed
        assert report.details["gap_measure_fraction"] == "1/10"
        assert (tmp_path / "class_1_generated.csv").exists()

    def test_multiclass_class_count(self, tmp_path):
        """Test a class count disagreeing with the manifolds raises."""
        with pytest.raises(ConfigError):
            run_experiment(tiny("multiclass", class_count=3), tmp_path)

    def test_cycle(self, tmp_path):
        """Test a short cycle run meets the measure and round-trip targets."""
        report = run_experiment(tiny("cycle", delta=0.2), tmp_path)
        checks = {t.name: t for t in report.targets}
        for name in ("source_deficit", "target_deficit", "exact_round_trip"):
            assert checks[name].passed, name
        assert "lipschitz_g" in report.metrics
        assert report.details["lipschitz_is_sampled"] is True
        assert (tmp_path / "forward.mlnet").exists()

    def test_cycle_needs_two_manifolds(self, tmp_path):
        """Test a single manifold raises."""
        with pytest.raises(ConfigError):
            run_experiment(tiny("cycle", manifolds=["circle"], manifold_params=[]), tmp_path)
