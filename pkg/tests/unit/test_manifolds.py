"""Tests for manifolds module."""

import math

import numpy as np
import pytest

from manifoldlab.exceptions import ChartDomainError, InvalidParameterError
from manifoldlab.manifolds import (
    MANIFOLD_IDS,
    EmbeddedManifold,
    christoffel,
    circle,
    embed,
    embed_points,
    embedding_jacobian,
    get_manifold,
    list_manifolds,
    metric,
    metric_points,
    sample_in_box,
    sample_uniform,
    sobol_points,
    sphere,
    spawn_seeds,
    total_volume,
    volume,
)


class TestCatalog:
    """Tests for the built-in manifolds."""

    def test_ids(self):
        """Test the four catalog identifiers."""
        assert set(MANIFOLD_IDS) == {"circle", "sphere", "clifford-torus", "torus3"}
        assert tuple(list_manifolds()) == MANIFOLD_IDS

    def test_unknown_id(self):
        """Test unknown identifier raises."""
        with pytest.raises(InvalidParameterError, match="Unknown manifold"):
            get_manifold("klein-bottle")

    def test_bad_parameter(self):
        """Test unsupported builder parameter raises."""
        with pytest.raises(InvalidParameterError):
            get_manifold("circle", height=2.0)

    def test_negative_radius(self):
        """Test non-positive radius raises."""
        with pytest.raises(InvalidParameterError, match="radius must be positive"):
            circle(radius=-1.0)

    def test_dimensions(self):
        """Test intrinsic and ambient dimensions."""
        dims = {mid: (get_manifold(mid).intrinsic_dim, get_manifold(mid).ambient_dim)
                for mid in MANIFOLD_IDS}
        assert dims == {
            "circle": (1, 2),
            "sphere": (2, 3),
            "clifford-torus": (2, 4),
            "torus3": (2, 3),
        }

    def test_diameters(self):
        """Test closed-form diameters."""
        assert get_manifold("circle", radius=2.0).analytic_diameter == pytest.approx(2 * math.pi)
        assert get_manifold("sphere").analytic_diameter == pytest.approx(math.pi)
        assert get_manifold("clifford-torus").analytic_diameter == pytest.approx(
            math.pi * math.sqrt(2)
        )
        assert get_manifold("torus3").analytic_diameter is None

    def test_chart_inverse_round_trip(self, unit_sphere, rng):
        """Test chart_inverse undoes the embedding away from the poles."""
        p = np.column_stack([rng.uniform(0.2, 3.0, 50), rng.uniform(0, 2 * np.pi, 50)])
        back = unit_sphere.chart_inverse(embed_points(unit_sphere, p))
        assert np.allclose(back, p, atol=1e-12)

    def test_invalid_box(self):
        """Test chart box validation."""
        with pytest.raises(InvalidParameterError):
            EmbeddedManifold(
                name="bad",
                intrinsic_dim=1,
                ambient_dim=1,
                chart_lower=(1.0,),
                chart_upper=(0.0,),
                embedding=lambda p: p,
                periodic=(False,),
            )


class TestDomain:
    """Tests for chart-domain checks."""

    def test_embed_circle(self, unit_circle):
        """Test embedding of theta = pi/2."""
        assert np.allclose(embed(unit_circle, [math.pi / 2]), [0.0, 1.0])

    def test_periodic_axis_not_bounds_checked(self, unit_circle):
        """Test a periodic coordinate outside [0, 2pi) is accepted."""
        assert np.allclose(embed(unit_circle, [2 * math.pi + 0.5]), embed(unit_circle, [0.5]))

    def test_outside_domain(self, unit_sphere):
        """Test theta beyond pi raises with the coordinate index."""
        with pytest.raises(ChartDomainError) as exc_info:
            embed(unit_sphere, [4.0, 0.0])
        assert exc_info.value.coordinate == 0

    def test_singular_band(self, unit_sphere):
        """Test points near a pole are refused."""
        with pytest.raises(ChartDomainError, match="singular"):
            embed(unit_sphere, [1e-3, 0.0])

    def test_wrong_shape(self, unit_sphere):
        """Test wrong point shape raises."""
        with pytest.raises(ChartDomainError):
            embed(unit_sphere, [0.5])

    def test_wrap(self, clifford):
        """Test periodic wrapping."""
        wrapped = clifford.wrap([[7.0, -1.0]])
        assert np.allclose(wrapped, [[7.0 - 2 * math.pi, 2 * math.pi - 1.0]])


class TestMetric:
    """Tests for the pullback metric and Christoffel symbols."""

    def test_sphere_metric(self, unit_sphere):
        """Test g = diag(1, sin^2 theta)."""
        g = metric(unit_sphere, [1.0, 0.3]).matrix
        assert np.allclose(g, np.diag([1.0, math.sin(1.0) ** 2]), atol=1e-12)

    def test_metric_matches_jacobian(self, clifford):
        """Test g = J^T J."""
        jac = embedding_jacobian(clifford, [0.4, 1.1])
        assert np.allclose(metric(clifford, [0.4, 1.1]).matrix, jac.T @ jac)

    @pytest.mark.parametrize("manifold_id", MANIFOLD_IDS)
    def test_batch_metric_symmetric(self, manifold_id):
        """Test batched metrics are symmetric positive definite across the chart."""
        manifold = get_manifold(manifold_id)
        p = sample_uniform(manifold, 10_000, seed=0)
        g = metric_points(manifold, p)
        assert g.shape == (10_000, manifold.intrinsic_dim, manifold.intrinsic_dim)
        assert np.allclose(g, np.swapaxes(g, 1, 2))
        assert np.all(np.linalg.eigvalsh(g) > 0)

    def test_christoffel_matches_sphere_oracle(self, unit_sphere):
        """Test finite-difference Christoffel symbols against the closed form."""
        p = np.array([1.0, 0.5])
        numeric = christoffel(unit_sphere, p).gamma
        exact = unit_sphere.analytic_christoffel(p)
        assert np.allclose(numeric, exact, atol=1e-5)

    def test_christoffel_torus_oracle(self):
        """Test finite-difference Christoffel symbols on the doughnut torus."""
        torus = get_manifold("torus3")
        p = np.array([0.7, 1.3])
        assert np.allclose(christoffel(torus, p).gamma, torus.analytic_christoffel(p), atol=1e-5)

    def test_flat_torus_christoffel_zero(self, clifford):
        """Test the flat torus has vanishing symbols."""
        assert np.allclose(christoffel(clifford, [1.0, 2.0]).gamma, 0.0, atol=1e-6)


class TestVolume:
    """Tests for Riemannian volume."""

    def test_circle_length(self):
        """Test circumference 2 pi r."""
        assert total_volume(circle(radius=2.0), 1024) == pytest.approx(4 * math.pi, rel=1e-9)

    def test_sphere_area(self, unit_sphere):
        """Test area 4 pi."""
        assert total_volume(unit_sphere, 512) == pytest.approx(4 * math.pi, rel=1e-4)

    def test_clifford_area(self, clifford):
        """Test area 4 pi^2."""
        assert total_volume(clifford, 64) == pytest.approx(4 * math.pi**2, rel=1e-12)

    def test_default_resolution_sphere_area(self, unit_sphere):
        """Test the default resolution already resolves the sphere area."""
        assert total_volume(unit_sphere) == pytest.approx(4 * math.pi, rel=1e-9)

    @pytest.mark.parametrize("manifold_id", MANIFOLD_IDS)
    def test_additive_over_split_box(self, manifold_id):
        """Test the two halves of a split box add up to the whole box."""
        manifold = get_manifold(manifold_id)
        lower = manifold.lower + 0.3
        upper = manifold.upper - 0.3
        cut = upper.copy()
        cut[0] = 0.5 * (lower[0] + upper[0])
        rest = lower.copy()
        rest[0] = cut[0]

        whole = volume(manifold, lower, upper)
        parts = volume(manifold, lower, cut) + volume(manifold, rest, upper)

        assert abs(parts - whole) <= 1e-6 * whole

    def test_additive_over_uneven_split(self, unit_sphere):
        """Test additivity when the cut is off-centre on the second axis."""
        lower, upper = np.array([0.2, 0.1]), np.array([2.9, 6.0])
        whole = volume(unit_sphere, lower, upper)
        left = volume(unit_sphere, lower, [2.9, 1.7])
        right = volume(unit_sphere, [0.2, 1.7], upper)
        assert left + right == pytest.approx(whole, rel=1e-6)

    def test_empty_region(self, unit_sphere):
        """Test a degenerate box has zero measure."""
        assert volume(unit_sphere, [1.0, 0.0], [1.0, 1.0], 16) == 0.0

    def test_region_outside_domain(self, unit_sphere):
        """Test a region escaping the chart raises."""
        with pytest.raises(ChartDomainError):
            volume(unit_sphere, [0.0, 0.0], [4.0, 1.0])

    def test_coarse_resolution_warns(self, unit_circle):
        """Test a tiny resolution warns."""
        with pytest.warns(UserWarning, match="coarse"):
            volume(unit_circle, [0.0], [1.0], 4)


class TestSampling:
    """Tests for area-uniform sampling."""

    def test_deterministic(self, unit_sphere):
        """Test equal seeds give equal samples."""
        a = sample_uniform(unit_sphere, 100, seed=3)
        b = sample_uniform(unit_sphere, 100, seed=3)
        assert np.array_equal(a, b)

    def test_sphere_uniform_height(self, unit_sphere):
        """Test z = cos(theta) is uniform on the sphere."""
        p = sample_uniform(unit_sphere, 20000, seed=0)
        z = np.cos(p[:, 0])
        assert abs(np.mean(z)) < 0.02
        assert np.mean(z > 0.5) == pytest.approx(0.25, abs=0.02)

    def test_rejection_torus(self):
        """Test rejection sampling favours the outer equator of the doughnut."""
        torus = get_manifold("torus3")
        p = sample_uniform(torus, 4000, seed=1)
        assert p.shape == (4000, 2)
        outer = np.mean(np.cos(p[:, 1]) > 0)
        assert outer > 0.54

    def test_low_discrepancy(self, unit_circle):
        """Test Sobol points cover the circle evenly."""
        p = sample_uniform(unit_circle, 256, seed=0, low_discrepancy=True)
        gaps = np.diff(np.sort(p[:, 0]))
        assert gaps.max() < 0.1

    def test_count_must_be_positive(self, unit_circle):
        """Test zero count raises."""
        with pytest.raises(InvalidParameterError):
            sample_uniform(unit_circle, 0)

    def test_sample_in_box(self, unit_sphere):
        """Test samples stay in the requested box."""
        p = sample_in_box(unit_sphere, np.array([1.0, 0.5]), np.array([2.0, 1.5]), 300, seed=2)
        assert np.all((p[:, 0] >= 1.0) & (p[:, 0] <= 2.0))
        assert np.all((p[:, 1] >= 0.5) & (p[:, 1] <= 1.5))

    def test_sample_in_empty_box(self, unit_circle):
        """Test an empty box raises."""
        with pytest.raises(InvalidParameterError):
            sample_in_box(unit_circle, np.array([1.0]), np.array([1.0]), 10)

    def test_sobol_points(self, rng):
        """Test Sobol output shape and range."""
        p = sobol_points(3, 100, rng)
        assert p.shape == (100, 3)
        assert np.all((p >= 0) & (p < 1))

    def test_spawn_seeds_independent(self):
        """Test child seeds differ from each other."""
        a, b = spawn_seeds(5, 2)
        assert np.random.default_rng(a).random() != np.random.default_rng(b).random()

    def test_spawn_seeds_shares_generator(self, rng):
        """Test a Generator is passed through."""
        assert all(s is rng for s in spawn_seeds(rng, 3))
