"""
Experiment runners.

Each runner takes a normalised :class:`ExperimentConfig` and an output
directory, executes its stages with per-stage seeds, writes point clouds,
checkpoints and plots, and returns an :class:`ExperimentReport`.

Stages log INFO on start and finish and DEBUG with their wall-clock time.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterator, Optional, Union

import numpy as np
from numpy.typing import NDArray

from manifoldlab.cycle import (
    build_matched_subsets,
    evaluate_cycle,
    exact_pair,
    ground_truth_diffeo,
    train_cycle,
)
from manifoldlab.embedding import (
    EmbeddingVerdict,
    build_conv_matrix,
    check_layer,
    check_network_injectivity,
    check_network_layers,
    check_restricted_injectivity,
    delta_kernel,
    loop_witness,
    numeric_rank,
    reads_every_input,
)
from manifoldlab.exceptions import ConfigError, ShapeError
from manifoldlab.experiments.config import ExperimentConfig
from manifoldlab.experiments.report import ExperimentReport
from manifoldlab.experiments.seeds import stage_int, stage_rng, stage_seed
from manifoldlab.generator import (
    build_generator,
    build_multiclass_map,
    build_multiclass_partition,
    estimate_diameter,
    face_continuity,
    latent_grid,
    surjectivity_check,
)
from manifoldlab.geodesics import default_steps, exp_map, integrate_geodesic, speed_drift
from manifoldlab.manifolds import (
    EmbeddedManifold,
    embed,
    embed_points,
    get_manifold,
    metric_points,
    sample_uniform,
)
from manifoldlab.metric_geometry import PointCloud, hausdorff, net_fineness
from manifoldlab.neural import (
    Conv2D,
    ConvTranspose2D,
    NetworkSpec,
    circular_conv,
    init_conv,
    mlp,
    save_network,
    train_regression,
)

logger = logging.getLogger(__name__)

Runner = Callable[[ExperimentConfig, Path], ExperimentReport]

# Geodesic audit thresholds
EXP_TOLERANCE = 1e-5
DRIFT_TOLERANCE = 1e-6
RK4_RATIO_RANGE = (12.0, 20.0)
MAX_SPEED = 2.0 * math.pi
MIN_SPEED = 0.5
DRIFT_REFINEMENT = 4

# Embedding-check thresholds
CONV_MATRIX_TOLERANCE = 1e-12
ROUND_TRIP_TOLERANCE = 1e-10
LOOP_RADIUS = 0.9


@dataclass(frozen=True)
class ExperimentInfo:
    """Catalog entry of one experiment."""

    name: str
    description: str
    certifies: str


EXPERIMENT_INFO: tuple[ExperimentInfo, ...] = (
    ExperimentInfo(
        "universality",
        "train a one-hidden-layer tanh network on the exponential-map generator",
        "a shallow network pushes the latent cube onto the manifold up to epsilon in Hausdorff distance",
    ),
    ExperimentInfo(
        "multiclass",
        "join one generator per class across a slab partition of the latent cube",
        "a single continuous generator covers several manifolds, losing at most delta of latent measure",
    ),
    ExperimentInfo(
        "embedding-check",
        "rank audit of dense, conv and transposed-conv layers and of expanding networks",
        "expanding layers with smooth monotone activations are generically smooth embeddings",
    ),
    ExperimentInfo(
        "cycle",
        "train a forward/backward network pair between chart subsets of two manifolds",
        "cycle composition error is bounded by (1 + Lipschitz constant) times the fit error",
    ),
    ExperimentInfo(
        "geodesic-audit",
        "compare numeric geodesics with closed-form oracles",
        "the exponential map used by the generator is accurate and fourth-order",
    ),
)


def list_experiments() -> list[ExperimentInfo]:
    """Experiment catalog in a fixed order."""
    return list(EXPERIMENT_INFO)


# =============================================================================
# Stage plumbing
# =============================================================================


class _Run:
    """Report under construction plus the output directory."""

    def __init__(self, config: ExperimentConfig, out_dir: Path) -> None:
        self.config = config
        self.out_dir = out_dir
        self.report = ExperimentReport(experiment=config.experiment, config=config.to_dict())

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        logger.info("%s: stage %s started", self.config.experiment, name)
        start = time.perf_counter()
        try:
            yield
        except Exception as e:
            logger.error("%s: stage %s failed: %s", self.config.experiment, name, e)
            e.add_note(f"in stage '{name}' of experiment '{self.config.experiment}'")
            raise
        elapsed = time.perf_counter() - start
        self.report.timings[name] = elapsed
        logger.debug("%s: stage %s took %.3fs", self.config.experiment, name, elapsed)
        logger.info("%s: stage %s finished", self.config.experiment, name)

    def seed(self, name: str) -> np.random.SeedSequence:
        return stage_seed(self.config.seed, name)

    def int_seed(self, name: str) -> int:
        return stage_int(self.config.seed, name)

    def cloud(self, points: NDArray[np.float64], name: str) -> Path:
        path = PointCloud(points, label=name).to_csv(self.out_dir / f"{name}.csv")
        self.report.artifacts.append(path.name)
        return path

    def checkpoint(self, net: NetworkSpec, name: str) -> Path:
        path = save_network(net, self.out_dir / f"{name}.mlnet")
        self.report.artifacts.append(path.name)
        return path

    def plot(self, name: str, draw: Callable[[], Any]) -> Optional[Path]:
        """Save the figure returned by ``draw`` as ``name.svg`` when matplotlib is available."""
        from manifoldlab import visualization

        if not visualization.HAS_MATPLOTLIB:
            warnings.warn(
                f"matplotlib is not installed; skipping {name}.svg", UserWarning, stacklevel=2
            )
            return None
        visualization.setup_manifoldlab_style()
        path = visualization.save_svg(draw(), self.out_dir / f"{name}.svg")
        self.report.artifacts.append(path.name)
        return path


def _radius(manifold: EmbeddedManifold, seed: np.random.SeedSequence) -> float:
    if manifold.analytic_diameter is not None:
        return float(manifold.analytic_diameter)
    return estimate_diameter(manifold, seed=seed).value


def _reference_sample(
    manifold: EmbeddedManifold, count: int, seed: np.random.SeedSequence
) -> NDArray[np.float64]:
    chart = sample_uniform(manifold, count, seed, low_discrepancy=True)
    return embed_points(manifold, chart, validate=False)


def _manifolds(config: ExperimentConfig) -> list[EmbeddedManifold]:
    return [config.manifold(i) for i in range(len(config.manifolds))]


# =============================================================================
# Universality
# =============================================================================


def run_universality(config: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    """Fit a tanh network to the generator of one manifold."""
    run = _Run(config, out_dir)
    report = run.report
    manifold = config.manifold(0)
    d, n = manifold.intrinsic_dim, manifold.ambient_dim

    with run.stage("diameter"):
        r0 = report.add_metric("R0", _radius(manifold, run.seed("diameter")))

    with run.stage("construction"):
        gen = build_generator(manifold, r0)
        surj = surjectivity_check(
            gen, config.grid_resolution, config.sample_count, run.seed("surjectivity")
        )
        reference = surj.reference.points
        report.add_target("construction_hausdorff", surj.distance, "<", config.epsilon)
        report.add_metric("construction_fineness", surj.generated_fineness)

    with run.stage("training"):
        latents = latent_grid(d, config.grid_resolution, run.seed("latents"))
        targets = gen.evaluate(latents)
        net = mlp(d, config.hidden, n, config.activation, seed=run.int_seed("init"))
        result = train_regression(net, latents, targets, config.train_config(run.int_seed("train")))
        report.add_metric("final_mse", result.final_loss)
        report.details["loss_history"] = result.loss_history
        report.add_metric("epochs_run", result.epochs_run)

    with run.stage("evaluation"):
        generated = result.network.forward(latents)
        distance = hausdorff(generated, reference)
        report.add_target("network_hausdorff", distance, "<", config.epsilon)
        report.add_metric("generated_fineness", net_fineness(generated))
        report.add_metric("reference_fineness", net_fineness(reference))
        report.add_metric("max_fit_error", float(np.max(np.linalg.norm(generated - targets, axis=1))))
        report.details["manifold"] = manifold.name
        report.details["latent_points"] = int(latents.shape[0])

    with run.stage("artifacts"):
        run.checkpoint(result.network, "network")
        run.cloud(reference, "reference")
        run.cloud(generated, "generated")
        run.cloud(surj.generated.points, "construction")
        from manifoldlab import visualization as vis

        stats = {"d_H": distance, "R0": r0}
        run.plot(
            "overlay",
            lambda: vis.plot_cloud_overlay(reference, generated, title=manifold.name, stats=stats),
        )
        run.plot("loss", lambda: vis.plot_loss_history({"loss": result.loss_history}))
    return report


# =============================================================================
# Multiclass
# =============================================================================


def run_multiclass(config: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    """Slab-partitioned generator for several manifolds, exact and trained."""
    run = _Run(config, out_dir)
    report = run.report
    c = config.class_count
    if len(config.manifolds) != c or c < 2:
        raise ConfigError(
            f"multiclass needs class_count >= 2 manifolds, got class_count={c} "
            f"and {len(config.manifolds)} manifolds",
            ["class_count", "manifolds"],
        )
    manifolds = _manifolds(config)
    dims = {m.intrinsic_dim for m in manifolds}
    if len(dims) != 1:
        raise ShapeError(f"multiclass manifolds must share one dimension, got {sorted(dims)}")
    d = dims.pop()
    n = manifolds[0].ambient_dim

    with run.stage("partition"):
        partition = build_multiclass_partition(c, config.delta, d)
        exact = partition.removed_measure_exact
        report.add_target("gap_measure", float(exact), "<=", config.delta)
        report.add_target(
            "gap_measure_exact",
            float(exact == Fraction(str(config.delta)) / 2),
            "==",
            1.0,
        )
        report.add_metric("gap_measure_measured", partition.measured_removed_fraction())
        report.details["gap_measure_fraction"] = str(exact)

    with run.stage("construction"):
        gens = [
            build_generator(m, _radius(m, run.seed(f"diameter:{i}")))
            for i, m in enumerate(manifolds)
        ]
        mc_map = build_multiclass_map(partition, gens)
        slab_grids = [partition.slab_grid(i, config.grid_resolution) for i in range(c)]
        references = [
            _reference_sample(m, config.sample_count, run.seed(f"reference:{i}"))
            for i, m in enumerate(manifolds)
        ]
        construction = [mc_map.evaluate(g) for g in slab_grids]
        per_class = [hausdorff(x, r) for x, r in zip(construction, references)]
        for i, cloud in enumerate(construction):
            report.add_metric(f"class_{i}_construction_fineness", net_fineness(cloud))
        report.add_target("construction_hausdorff_max", max(per_class), "<", config.epsilon)
        report.details["construction_hausdorff"] = per_class

    with run.stage("continuity"):
        faces = face_continuity(mc_map, seed=run.seed("faces"))
        report.add_metric("face_max_jump", faces.max_jump)
        report.add_metric("face_bound", faces.bound)
        report.add_target("face_continuous", float(faces.continuous), "==", 1.0)

    with run.stage("training"):
        latents = latent_grid(d, config.grid_resolution, run.seed("latents"))
        targets = mc_map.evaluate(latents)
        net = mlp(d, config.hidden, n, config.activation, seed=run.int_seed("init"))
        result = train_regression(net, latents, targets, config.train_config(run.int_seed("train")))
        report.add_metric("final_mse", result.final_loss)
        report.details["loss_history"] = result.loss_history
        trained = [result.network.forward(g) for g in slab_grids]
        trained_distances = [hausdorff(x, r) for x, r in zip(trained, references)]
        for i, value in enumerate(trained_distances):
            report.add_metric(f"class_{i}_trained_hausdorff", value)
            report.add_metric(f"class_{i}_reference_fineness", net_fineness(references[i]))
        report.details["trained_hausdorff"] = trained_distances

    with run.stage("artifacts"):
        run.checkpoint(result.network, "network")
        for i in range(c):
            run.cloud(references[i], f"class_{i}_reference")
            run.cloud(construction[i], f"class_{i}_construction")
            run.cloud(trained[i], f"class_{i}_generated")
        from manifoldlab import visualization as vis

        run.plot("classes", lambda: vis.plot_class_clouds(trained, references, title="multiclass"))
        run.plot("loss", lambda: vis.plot_loss_history({"loss": result.loss_history}))
    return report


# =============================================================================
# Embedding check
# =============================================================================


def _conv_cases(config: ExperimentConfig) -> Iterator[tuple[int, int, int, int, int]]:
    grid = config.shape_grid
    for m in grid["sizes"]:
        for k in grid["channels"]:
            for l in grid["channels"]:
                for s in grid["kernels"]:
                    if s > m:
                        continue
                    for t in grid["strides"]:
                        yield m, k, l, s, t


def _witness_certified(m: int, k: int, l: int, s: int, t: int) -> bool:
    """Shapes whose delta-kernel matrix is provably injective."""
    return t == 1 and l >= k


def _generic_certified(layer: Conv2D, verdict: EmbeddingVerdict) -> bool:
    """
    Strided shapes with a full-rank representative.

    The shape must read every input pixel, and either the delta kernel or
    the layer's own kernel must give a full-rank matrix. Injectivity of one
    kernel makes rank deficiency a measure-zero event for Gaussian redraws.
    """
    m, s, t = layer.in_size, layer.kernel_size, layer.stride
    if not reads_every_input(m, s, t):
        return False
    if verdict.actual_rank == verdict.input_dim:
        return True
    kernel = delta_kernel(layer.out_channels, layer.in_channels, s)
    witness = Conv2D(layer.activation, kernel, np.zeros(layer.out_channels), m, t)
    return numeric_rank(build_conv_matrix(witness).matrix).full_rank


def _transpose_certified(k: int, l: int) -> bool:
    """Transposed layers reading l maps and writing k >= l maps."""
    return l <= k


def run_embedding_check(config: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    """Conv-matrix faithfulness, layer verdicts and network injectivity."""
    run = _Run(config, out_dir)
    report = run.report
    rng = stage_rng(config.seed, "conv-weights")
    trials = max(config.trials, 1)

    max_error = 0.0
    duality_mismatch = 0
    witness_failures = 0
    certified_deficient = 0
    generic_deficient = 0
    generic_certified: list[list[int]] = []
    uncertified: list[dict[str, Any]] = []
    not_expanding_cases = 0
    not_expanding_missed = 0
    case_count = 0

    with run.stage("conv-grid"):
        for m, k, l, s, t in _conv_cases(config):
            case_count += 1
            layer = init_conv(m, k, l, s, t, "tanh", rng)
            matrix = build_conv_matrix(layer).matrix
            x = rng.standard_normal((3, k, m, m))
            direct = circular_conv(x, layer.kernel, t).reshape(3, -1)
            via_matrix = x.reshape(3, -1) @ matrix.T
            max_error = max(max_error, float(np.max(np.abs(direct - via_matrix))))

            transposed = ConvTranspose2D(layer.activation, layer.kernel, np.zeros(k), m, t)
            if not np.array_equal(build_conv_matrix(transposed).matrix, matrix.T):
                duality_mismatch += 1

            case_seed = run.seed(f"conv:{m}:{k}:{l}:{s}:{t}")
            verdict = check_layer(layer, trials, case_seed)
            if not verdict.expanding:
                not_expanding_cases += 1
                if verdict.verdict.value != "not_expanding":
                    not_expanding_missed += 1
            elif _witness_certified(m, k, l, s, t):
                witness = Conv2D(layer.activation, delta_kernel(l, k, s), np.zeros(l), m, t)
                if not numeric_rank(build_conv_matrix(witness).matrix).full_rank:
                    witness_failures += 1
                certified_deficient += verdict.deficient_trials
            elif _generic_certified(layer, verdict):
                generic_certified.append([m, k, l, s, t])
                generic_deficient += verdict.deficient_trials
            else:
                uncertified.append(
                    {"shape": [m, k, l, s, t], "verdict": verdict.verdict.value}
                )

            if _transpose_certified(k, l):
                up = ConvTranspose2D(
                    layer.activation, delta_kernel(l, k, s), np.zeros(k), m, t
                )
                if not numeric_rank(build_conv_matrix(up).matrix).full_rank:
                    witness_failures += 1
                up_verdict = check_layer(transposed, trials, run.seed(f"conv-t:{m}:{k}:{l}:{s}:{t}"))
                certified_deficient += up_verdict.deficient_trials

        report.add_metric("conv_cases", case_count)
        report.add_target("conv_matrix_max_error", max_error, "<=", CONV_MATRIX_TOLERANCE)
        report.add_target("transpose_duality_mismatches", duality_mismatch, "==", 0.0)
        report.add_target("witness_failures", witness_failures, "==", 0.0)
        report.add_target("certified_deficient_trials", certified_deficient, "==", 0.0)
        report.add_target("generic_deficient_trials", generic_deficient, "==", 0.0)
        report.add_metric("not_expanding_cases", not_expanding_cases)
        report.add_target("not_expanding_missed", not_expanding_missed, "==", 0.0)
        report.add_metric("uncertified_expanding_cases", len(uncertified))
        report.details["uncertified_expanding"] = uncertified
        report.details["generic_certified"] = generic_certified

    widths = config.hidden
    latent_dim = 2
    with run.stage("network"):
        net = mlp(
            latent_dim,
            widths[:-1],
            widths[-1],
            config.activation,
            output_activation=config.activation,
            seed=run.int_seed("network-init"),
        )
        layer_verdicts = check_network_layers(net, trials, run.seed("network-layers"))
        report.details["network_layers"] = [v.to_dict() for v in layer_verdicts]
        report.add_target(
            "network_layers_embedding",
            float(all(v.is_embedding for v in layer_verdicts)),
            "==",
            1.0,
        )
        injectivity = check_network_injectivity(
            net, max(config.sample_count, 2), run.seed("network-points")
        )
        report.details["network_injectivity"] = injectivity.to_dict()
        report.add_target("network_min_rank", injectivity.min_rank, ">=", latent_dim)
        report.add_target("network_rank_stable", float(injectivity.rank_stable), "==", 1.0)
        report.add_target("network_distinct_outputs", float(injectivity.distinct_outputs), "==", 1.0)

        shrinking = mlp(
            latent_dim,
            [max(widths), 1],
            max(widths),
            config.activation,
            seed=run.int_seed("shrinking-init"),
        )
        flagged = check_network_injectivity(shrinking, 4, run.seed("shrinking-points"))
        report.add_target("non_expanding_detected", float(not flagged.precondition_ok), "==", 1.0)

    with run.stage("restricted"):
        latent_circle = get_manifold("circle", radius=LOOP_RADIUS)
        restricted = check_restricted_injectivity(
            net, latent_circle, samples=256, seed=run.seed("restricted")
        )
        report.details["restricted"] = restricted.to_dict()
        report.add_target("restricted_min_rank", restricted.min_rank, ">=", 1.0)
        loop = loop_witness(net, radius=LOOP_RADIUS)
        report.details["loop"] = loop.to_dict()
        report.add_metric("loop_min_nonadjacent_distance", loop.min_nonadjacent_distance)
        report.add_target("loop_simple_closed", float(loop.simple_closed), "==", 1.0)

    with run.stage("artifacts"):
        run.checkpoint(net, "network")
        angles = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        circle_points = LOOP_RADIUS * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        image = net.forward(circle_points)
        run.cloud(image, "loop_image")
        from manifoldlab import visualization as vis

        run.plot(
            "loop",
            lambda: vis.plot_cloud_overlay(image, image, title="latent circle image"),
        )
    return report


# =============================================================================
# Cycle
# =============================================================================


def run_cycle(config: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    """Exact and trained cycle pairs between two chart subsets."""
    run = _Run(config, out_dir)
    report = run.report
    if len(config.manifolds) != 2:
        raise ConfigError(
            f"cycle needs exactly 2 manifolds, got {len(config.manifolds)}", ["manifolds"]
        )
    src, dst = _manifolds(config)

    with run.stage("subsets"):
        source, target = build_matched_subsets(src, dst, config.delta)
        report.add_metric("radius_param", source.radius_param)
        for label, subset in (("source", source), ("target", target)):
            report.add_target(f"{label}_deficit", subset.measure_deficit, "<", config.delta)
            refined = subset.recompute_deficit(2 * subset.resolution)
            report.add_target(f"{label}_deficit_refined", refined, "<", config.delta)
            change = abs(refined - subset.measure_deficit) / max(subset.total_measure, 1e-300)
            report.add_metric(f"{label}_deficit_quadrature_change", change)

    with run.stage("ground-truth"):
        truth = evaluate_cycle(
            exact_pair(source, target), min(config.sample_count, 1024), run.seed("exact-eval")
        )
        report.add_target(
            "exact_round_trip",
            max(truth.composition_error_fwd, truth.composition_error_bwd),
            "<",
            ROUND_TRIP_TOLERANCE,
        )

    with run.stage("training"):
        pair = train_cycle(
            source,
            target,
            hidden=config.hidden,
            config=config.train_config(run.int_seed("train")),
            sample_count=max(config.sample_count, 1),
            seed=run.seed("cycle-init"),
        )
        report.add_target("fit_eps", pair.fit_eps, "<", config.epsilon)
        report.add_metric("forward_fit_error", pair.forward_fit_error)
        report.add_metric("backward_fit_error", pair.backward_fit_error)
        report.details["loss_history"] = pair.forward_history
        report.details["backward_loss_history"] = pair.backward_history

    with run.stage("evaluation"):
        result = evaluate_cycle(pair, max(config.sample_count, 2), run.seed("cycle-eval"))
        for key in (
            "hausdorff_forward",
            "hausdorff_backward",
            "composition_error_fwd",
            "composition_error_bwd",
            "lipschitz_g",
            "lipschitz_f",
            "bound_fwd",
            "bound_bwd",
            "target_fineness",
            "source_fineness",
        ):
            report.add_metric(key, getattr(result, key))
        report.add_target("composition_bound_ok", float(result.bound_ok), "==", 1.0)
        report.details["lipschitz_is_sampled"] = result.lipschitz_is_sampled

    with run.stage("artifacts"):
        run.checkpoint(pair.forward_net, "forward")
        run.checkpoint(pair.backward_net, "backward")
        xs = source.sample_ambient(min(config.sample_count, 1024), run.seed("plot-sample"))
        images = pair.forward_net(xs)
        truth_images = ground_truth_diffeo(source, target).forward(xs)
        run.cloud(truth_images, "target")
        run.cloud(images, "forward_image")
        from manifoldlab import visualization as vis

        run.plot(
            "overlay",
            lambda: vis.plot_cloud_overlay(truth_images, images, title="forward map"),
        )
        run.plot(
            "loss",
            lambda: vis.plot_loss_history(
                {"forward": pair.forward_history, "backward": pair.backward_history}
            ),
        )
    return report


# =============================================================================
# Geodesic audit
# =============================================================================


def _audit_points(
    manifold: EmbeddedManifold, count: int, rng: np.random.Generator
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Random base points and velocities with metric speed in [MIN_SPEED, MAX_SPEED].

    Catalog metrics are diagonal, so the unit velocity of heading beta is
    (cos beta / sqrt(g_00), sin beta / sqrt(g_11)). On charts with singular
    coordinates the base point stays in the middle third of that axis and
    the heading keeps |sin beta| >= 0.8, which keeps the great circle away
    from the singular band.
    """
    lower = np.asarray(manifold.chart_lower)
    upper = np.asarray(manifold.chart_upper)
    d = manifold.intrinsic_dim
    q = lower + (upper - lower) * rng.random((count, d))
    singular = bool(manifold.singular_coords)
    for axis, _ in manifold.singular_coords:
        span = upper[axis] - lower[axis]
        q[:, axis] = lower[axis] + span * (1.0 + rng.random(count)) / 3.0
    g = metric_points(manifold, q)
    scale = 1.0 / np.sqrt(np.diagonal(g, axis1=1, axis2=2))
    if d == 1:
        direction = rng.choice([-1.0, 1.0], size=(count, 1))
    else:
        if singular:
            low = math.asin(0.8)
            beta = rng.uniform(low, math.pi - low, count) * rng.choice([-1.0, 1.0], count)
        else:
            beta = rng.uniform(0.0, 2.0 * math.pi, count)
        direction = np.stack([np.cos(beta), np.sin(beta)], axis=1)
    speeds = rng.uniform(MIN_SPEED, MAX_SPEED, count)
    return q, direction * scale * speeds[:, None]


def rk4_error_ratio(
    manifold: Optional[EmbeddedManifold] = None,
    q: tuple[float, ...] = (math.pi / 2, 0.0),
    v: tuple[float, ...] = (0.6, 0.8),
    total_time: float = 2.0,
    steps: int = 40,
) -> float:
    """
    Error ratio of ``steps`` against ``2 * steps`` RK4 steps.

    Errors are measured in ambient space against the closed-form
    exponential map; a fourth-order method gives a ratio near 16.
    """
    manifold = manifold or get_manifold("sphere")
    exact = exp_map(manifold, q, total_time * np.asarray(v), method="analytic")
    errors = []
    for n in (steps, 2 * steps):
        traj = integrate_geodesic(manifold, q, v, total_time, n)
        end = embed(manifold, manifold.wrap(traj.final.position))
        errors.append(float(np.linalg.norm(end - exact)))
    return errors[0] / errors[1]


def run_geodesic_audit(config: ExperimentConfig, out_dir: Path) -> ExperimentReport:
    """Numeric exponential map against closed-form oracles."""
    run = _Run(config, out_dir)
    report = run.report
    trials = max(config.trials, 1)
    exp_errors: dict[str, float] = {}
    drifts: dict[str, float] = {}
    skipped: list[str] = []

    with run.stage("oracles"):
        for i, manifold in enumerate(_manifolds(config)):
            name = config.manifolds[i]
            if manifold.analytic_exp is None:
                warnings.warn(
                    f"{name} has no closed-form exponential map; skipped", UserWarning, stacklevel=2
                )
                skipped.append(name)
                continue
            rng = stage_rng(config.seed, f"geodesic:{i}:{name}")
            qs, vs = _audit_points(manifold, trials, rng)
            worst_exp = 0.0
            worst_drift = 0.0
            for q, v in zip(qs, vs):
                numeric = exp_map(manifold, q, v, method="numeric")
                analytic = exp_map(manifold, q, v, method="analytic")
                worst_exp = max(worst_exp, float(np.linalg.norm(numeric - analytic)))
                speed = float(np.sqrt(v @ metric_points(manifold, q[None, :])[0] @ v))
                traj = integrate_geodesic(
                    manifold, q, v, 1.0, DRIFT_REFINEMENT * default_steps(speed)
                )
                worst_drift = max(worst_drift, speed_drift(manifold, traj))
            exp_errors[name] = worst_exp
            drifts[name] = worst_drift
            report.add_metric(f"{name}_exp_error", worst_exp)
            report.add_metric(f"{name}_speed_drift", worst_drift)

    with run.stage("rk4-order"):
        ratio = rk4_error_ratio()
        report.add_target("rk4_ratio_min", ratio, ">=", RK4_RATIO_RANGE[0])
        report.add_target("rk4_ratio_max", ratio, "<=", RK4_RATIO_RANGE[1])

    if exp_errors:
        report.add_target("exp_error_max", max(exp_errors.values()), "<=", EXP_TOLERANCE)
        report.add_target("speed_drift_max", max(drifts.values()), "<", DRIFT_TOLERANCE)
    report.details["skipped"] = skipped
    report.details["exp_errors"] = exp_errors
    report.details["speed_drifts"] = drifts
    return report


# =============================================================================
# Dispatch
# =============================================================================

RUNNERS: dict[str, Runner] = {
    "universality": run_universality,
    "multiclass": run_multiclass,
    "embedding-check": run_embedding_check,
    "cycle": run_cycle,
    "geodesic-audit": run_geodesic_audit,
}


def run_experiment(
    config: ExperimentConfig, out_dir: Optional[Union[str, Path]] = None
) -> ExperimentReport:
    """
    Run one experiment and write its report.

    Parameters
    ----------
    config : ExperimentConfig
        Normalised configuration.
    out_dir : str or Path, optional
        Overrides the configured output directory.

    Returns
    -------
    ExperimentReport
        Also written as ``report.json`` and ``report.md`` in the output
        directory.
    """
    from manifoldlab.reports import write_markdown_report

    directory = config.resolve_output_dir(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    logger.info("running %s (seed %d) into %s", config.experiment, config.seed, directory)
    report = RUNNERS[config.experiment](config, directory)
    report.artifacts.extend(["report.json", "report.md"])
    report.write(directory)
    write_markdown_report(report, directory / "report.md")
    logger.info(
        "%s %s: %d/%d targets met",
        config.experiment,
        "passed" if report.passed else "failed",
        sum(t.passed for t in report.targets),
        len(report.targets),
    )
    return report
