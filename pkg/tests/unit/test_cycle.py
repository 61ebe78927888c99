"""Tests for cycle module."""

import math

import numpy as np
import pytest

from manifoldlab.cycle import (
    build_chart_subset,
    build_matched_subsets,
    evaluate_cycle,
    exact_pair,
    ground_truth_diffeo,
    holdout_points,
    tangential_lipschitz,
    train_cycle,
)
from manifoldlab.exceptions import InvalidParameterError, PrecisionError, ShapeError
from manifoldlab.manifolds import circle
from manifoldlab.neural import NetworkSpec, TrainConfig


@pytest.fixture
def circle_pair():
    """Matched subsets of the unit circle and the circle of radius 2."""
    return build_matched_subsets(circle(), circle(radius=2.0), 0.05)


class TestChartSubset:
    """Tests for near-full-measure chart subsets."""

    def test_circle_deficit(self, unit_circle):
        """Test the deficit stays below delta."""
        delta = 0.1 * 2 * math.pi
        subset = build_chart_subset(unit_circle, delta)
        assert subset.measure_deficit < delta
        assert subset.measure_deficit <= 0.95 * delta + 1e-9
        assert subset.kept_measure >= 0.9 * 2 * math.pi
        assert 0 < subset.radius_param <= 1

    def test_sphere_deficit(self, unit_sphere):
        """Test a sphere subset avoids the poles and keeps most of the area."""
        subset = build_chart_subset(unit_sphere, 0.5, resolution=128)
        assert subset.measure_deficit < 0.5
        assert subset.lower[0] > unit_sphere.singular_margin
        assert subset.upper[0] < math.pi - unit_sphere.singular_margin
        assert subset.recompute_deficit(256) < 0.5

    def test_fixed_radius(self, unit_circle):
        """Test a fixed shrink factor is used as given."""
        subset = build_chart_subset(unit_circle, 1.0, radius_param=0.9)
        assert subset.radius_param == 0.9

    def test_normalize_round_trip(self, unit_circle, rng):
        """Test normalize and denormalize are inverse."""
        subset = build_chart_subset(unit_circle, 0.3)
        p = rng.uniform(subset.lower, subset.upper, (10, 1))
        unit = subset.normalize(p)
        assert np.all(np.abs(unit) <= 1.0)
        assert np.allclose(subset.denormalize(unit), p)
        assert np.all(subset.contains(p))

    def test_sample_inside(self, unit_circle):
        """Test samples lie in the kept box."""
        subset = build_chart_subset(unit_circle, 0.3)
        assert np.all(subset.contains(subset.sample(100, seed=0)))
        assert subset.sample_ambient(5, seed=0).shape == (5, 2)

    @pytest.mark.parametrize("delta", [0.0, -1.0, 7.0])
    def test_delta_out_of_range(self, unit_circle, delta):
        """Test delta outside (0, volume) raises."""
        with pytest.raises(InvalidParameterError):
            build_chart_subset(unit_circle, delta)

    def test_slit_exceeds_delta(self, unit_circle):
        """Test a delta smaller than the slits raises."""
        with pytest.raises(PrecisionError):
            build_chart_subset(unit_circle, 1e-6)

    def test_invalid_radius(self, unit_circle):
        """Test radius_param outside (0, 1] raises."""
        with pytest.raises(InvalidParameterError):
            build_chart_subset(unit_circle, 0.5, radius_param=1.5)


class TestMatchedSubsets:
    """Tests for subsets sharing one shrink factor."""

    def test_shared_radius(self, circle_pair):
        """Test both subsets use the same r and meet delta."""
        source, target = circle_pair
        assert source.radius_param == target.radius_param
        assert source.measure_deficit < 0.05
        assert target.measure_deficit < 0.05

    def test_dimension_mismatch(self, unit_circle, unit_sphere):
        """Test manifolds of different dimension raise."""
        with pytest.raises(ShapeError):
            build_matched_subsets(unit_circle, unit_sphere, 0.1)


class TestGroundTruth:
    """Tests for the explicit diffeomorphism."""

    def test_forward(self):
        """Test the quarter point maps to the quarter point."""
        a = build_chart_subset(circle(), 0.1, radius_param=1.0)
        b = build_chart_subset(circle(2.0), 0.1, radius_param=1.0)
        assert np.allclose(ground_truth_diffeo(a, b).forward([[0.0, 1.0]]), [[0.0, 2.0]])

    def test_inverse(self, circle_pair):
        """Test g(f(x)) = x."""
        source, target = circle_pair
        diffeo = ground_truth_diffeo(source, target)
        xs = source.sample_ambient(50, seed=1)
        assert np.allclose(diffeo.inverse(diffeo.forward(xs)), xs, atol=1e-12)

    def test_dimension_mismatch(self, unit_sphere):
        """Test subsets of different dimension raise."""
        a = build_chart_subset(circle(), 0.3)
        b = build_chart_subset(unit_sphere, 1.0, resolution=64)
        with pytest.raises(InvalidParameterError):
            ground_truth_diffeo(a, b)

    def test_lipschitz_of_scaling(self, circle_pair):
        """Test doubling the radius doubles the tangential derivative."""
        source, target = circle_pair
        diffeo = ground_truth_diffeo(source, target)
        chart = source.sample(40, seed=0)
        lip = tangential_lipschitz(diffeo.forward, source, chart)
        assert lip == pytest.approx(2.0, rel=1e-4)

    def test_lipschitz_of_network_uses_jacobians(self, circle_pair, quick_training):
        """Test network Jacobians agree with differencing the same network."""
        source, target = circle_pair
        config = TrainConfig(**quick_training)
        pair = train_cycle(
            source, target, hidden=[8], config=config, sample_count=64, holdout=16, seed=3
        )
        net = pair.forward_net
        chart = source.sample(40, seed=2)
        exact = tangential_lipschitz(net, source, chart)
        differenced = tangential_lipschitz(lambda x: net.forward(x), source, chart)
        assert exact > 0
        assert exact == pytest.approx(differenced, rel=1e-6)


class TestCyclePair:
    """Tests for exact and trained pairs."""

    def test_exact_pair(self, circle_pair):
        """Test the exact pair composes to the identity."""
        pair = exact_pair(*circle_pair)
        report = evaluate_cycle(pair, 200, seed=0)
        assert not pair.trained
        assert report.composition_error_fwd < 1e-10
        assert report.composition_error_bwd < 1e-10
        assert report.hausdorff_forward == 0.0
        assert report.bound_ok
        assert report.lipschitz_is_sampled

    def test_train_cycle(self, circle_pair, quick_training):
        """Test a short training run produces a complete report."""
        config = TrainConfig(**quick_training)
        pair = train_cycle(*circle_pair, hidden=[8], config=config, sample_count=64, holdout=32, seed=0)
        assert pair.trained
        assert isinstance(pair.forward_net, NetworkSpec)
        assert len(pair.forward_history) == quick_training["epochs"] + 1
        assert pair.fit_eps == max(pair.forward_fit_error, pair.backward_fit_error)
        report = evaluate_cycle(pair, 64, seed=0)
        data = report.to_dict()
        assert data["sample_count"] == 64
        assert all(np.isfinite(v) for v in data.values() if isinstance(v, float))
        assert report.bound_fwd == pytest.approx((1 + report.lipschitz_g) * pair.fit_eps)

    def test_train_reproducible(self, circle_pair, quick_training):
        """Test equal seeds give equal fit errors."""
        config = TrainConfig(**quick_training)
        a = train_cycle(*circle_pair, hidden=[4], config=config, sample_count=32, holdout=16, seed=5)
        b = train_cycle(*circle_pair, hidden=[4], config=config, sample_count=32, holdout=16, seed=5)
        assert a.fit_eps == b.fit_eps

    def test_holdout_points(self, circle_pair):
        """Test the holdout grid lies on the manifold."""
        source, _ = circle_pair
        pts = holdout_points(source, 20)
        assert pts.shape == (20, 2)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)
