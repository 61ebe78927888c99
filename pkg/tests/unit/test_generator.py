"""Tests for generator module."""

import math
from fractions import Fraction

import numpy as np
import pytest

from manifoldlab.exceptions import InvalidParameterError, ShapeError
from manifoldlab.generator import (
    build_generator,
    build_multiclass_map,
    build_multiclass_partition,
    check_cube_contains_ball,
    estimate_diameter,
    face_continuity,
    latent_grid,
    max_chordal_distance,
    orthonormal_frame,
    surjectivity_check,
    verify_surjectivity,
)
from manifoldlab.manifolds import circle, get_manifold, metric


@pytest.fixture
def two_circles():
    """Multiclass map over two unit circles centred at (+-1.5, 0)."""
    partition = build_multiclass_partition(2, 0.2, 1)
    gens = [
        build_generator(circle(center=[-1.5, 0.0]), math.pi),
        build_generator(circle(center=[1.5, 0.0]), math.pi),
    ]
    return build_multiclass_map(partition, gens)


class TestBuildGenerator:
    """Tests for the exponential-map surjection."""

    def test_circle_endpoints(self, unit_circle):
        """Test z = +-1 reach the antipode of the base point."""
        f = build_generator(unit_circle, math.pi)
        assert np.allclose(f.evaluate([1.0]), [-1.0, 0.0])
        assert np.allclose(f.evaluate([-1.0]), [-1.0, 0.0])
        assert np.allclose(f.evaluate([0.0]), [1.0, 0.0])

    def test_batch_shape(self, unit_sphere):
        """Test batch evaluation returns (N, n)."""
        f = build_generator(unit_sphere, math.pi)
        assert f.evaluate(np.zeros((7, 2))).shape == (7, 3)
        assert f.latent_dim == 2
        assert f.ambient_dim == 3

    def test_wrong_latent_dim(self, unit_sphere):
        """Test latent dimension mismatch raises."""
        f = build_generator(unit_sphere, 1.0)
        with pytest.raises(InvalidParameterError):
            f.evaluate([0.1, 0.2, 0.3])

    def test_negative_radius(self, unit_circle):
        """Test negative radius raises."""
        with pytest.raises(InvalidParameterError):
            build_generator(unit_circle, -1.0)

    def test_zero_radius_warns(self, unit_circle):
        """Test zero radius warns and collapses to the base point."""
        with pytest.warns(UserWarning, match="radius 0"):
            f = build_generator(unit_circle, 0.0)
        assert np.allclose(f.evaluate([[0.3], [-0.9]]), [[1.0, 0.0], [1.0, 0.0]])

    def test_frame_is_orthonormal(self, unit_sphere):
        """Test F^T g F = I."""
        g = metric(unit_sphere, [1.0, 0.3]).matrix
        frame = orthonormal_frame(g)
        assert np.allclose(frame.T @ g @ frame, np.eye(2))

    def test_cube_contains_ball(self, unit_sphere):
        """Test the scaled cube contains the metric ball."""
        f = build_generator(unit_sphere, 2.0, base_point=[1.0, 0.5])
        assert check_cube_contains_ball(f, 2000, seed=0) <= 1.0 + 1e-12


class TestLatentGrid:
    """Tests for latent sampling."""

    def test_tensor_grid(self):
        """Test d = 2 gives a tensor grid with corners."""
        grid = latent_grid(2, 3)
        assert grid.shape == (9, 2)
        assert [-1.0, -1.0] in grid.tolist()
        assert [1.0, 1.0] in grid.tolist()

    def test_single_point(self):
        """Test resolution 1 is the cube centre."""
        assert latent_grid(1, 1).tolist() == [[0.0]]

    def test_sobol_high_dim(self):
        """Test d >= 3 uses Sobol points in the cube."""
        grid = latent_grid(3, 100, seed=0)
        assert grid.shape == (100, 3)
        assert np.all(np.abs(grid) <= 1.0)

    def test_invalid_resolution(self):
        """Test zero resolution raises."""
        with pytest.raises(InvalidParameterError):
            latent_grid(2, 0)


class TestSurjectivity:
    """Tests for the Hausdorff surjectivity check."""

    def test_circle(self, unit_circle):
        """Test R0 = pi covers the circle."""
        f = build_generator(unit_circle, math.pi)
        assert verify_surjectivity(f, 2048, 2048, seed=0) < 0.01

    def test_sphere(self, unit_sphere):
        """Test R0 = pi covers the sphere."""
        f = build_generator(unit_sphere, math.pi)
        result = surjectivity_check(f, 64, 1000, seed=1)
        assert result.distance < 0.3
        assert len(result.generated) == 64 * 64
        assert len(result.reference) == 1000
        assert result.reference_fineness > 0

    def test_finer_grid_is_closer(self, unit_circle):
        """Test doubling the grid resolution reduces the distance."""
        f = build_generator(unit_circle, math.pi)
        coarse = verify_surjectivity(f, 64, 2048, seed=0)
        fine = verify_surjectivity(f, 128, 2048, seed=0)
        assert fine < coarse

    def test_short_radius_misses(self, unit_circle):
        """Test R0 below the diameter leaves part of M uncovered."""
        f = build_generator(unit_circle, 1.0)
        assert verify_surjectivity(f, 512, 512, seed=0) > 0.5

    def test_deterministic(self, unit_sphere):
        """Test equal seeds give equal distances."""
        f = build_generator(unit_sphere, math.pi)
        assert verify_surjectivity(f, 16, 200, seed=4) == verify_surjectivity(f, 16, 200, seed=4)

    def test_invalid_sample_count(self, unit_circle):
        """Test zero samples raises."""
        f = build_generator(unit_circle, math.pi)
        with pytest.raises(InvalidParameterError):
            surjectivity_check(f, 8, 0)


class TestEstimateDiameter:
    """Tests for graph diameter estimation."""

    def test_circle(self, unit_circle):
        """Test the estimate bounds pi from above."""
        est = estimate_diameter(unit_circle, 1000, 5, seed=0)
        assert math.pi <= est.value < 1.2 * math.pi * 1.05
        assert est.chordal_bound <= 2.0 + 1e-12

    def test_doughnut(self):
        """Test the estimate on the doughnut torus exceeds its chordal width."""
        torus = get_manifold("torus3")
        est = estimate_diameter(torus, 1500, 10, seed=0)
        assert est.value >= est.chordal_bound
        assert est.chordal_bound == pytest.approx(5.0, abs=0.1)

    def test_sample_count_too_small(self, unit_circle):
        """Test sample_count < 10 k raises."""
        with pytest.raises(InvalidParameterError):
            estimate_diameter(unit_circle, 40, 5)

    def test_chordal(self):
        """Test largest pairwise distance."""
        assert max_chordal_distance(np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]])) == 5.0


class TestSlabPartition:
    """Tests for the multiclass slab partition."""

    def test_two_classes(self):
        """Test slabs [-1, -0.1] and [0.1, 1]."""
        p = build_multiclass_partition(2, 0.2, 2)
        assert p.gap_half_width == pytest.approx(0.1)
        assert p.first_axis_interval(0) == pytest.approx((-1.0, -0.1))
        assert p.first_axis_interval(1) == pytest.approx((0.1, 1.0))

    def test_removed_measure(self):
        """Test removed measure is delta / 2 for every class count."""
        for c in (2, 3, 5):
            p = build_multiclass_partition(c, 0.2, 2)
            assert p.removed_measure_exact == Fraction(1, 10)
            assert p.removed_measure == pytest.approx(0.1)
            assert p.measured_removed_fraction() == pytest.approx(0.1)

    def test_locate(self):
        """Test slab and gap indices."""
        p = build_multiclass_partition(2, 0.2, 1)
        assert p.locate([[-0.5], [0.0], [0.5]]).tolist() == [0, 1, 2]

    def test_slab_grid(self):
        """Test the slab grid stays inside its slab."""
        p = build_multiclass_partition(3, 0.3, 2)
        a, b = p.first_axis_interval(1)
        grid = p.slab_grid(1, 5)
        assert grid.shape == (25, 2)
        assert grid[:, 0].min() == pytest.approx(a)
        assert grid[:, 0].max() == pytest.approx(b)

    @pytest.mark.parametrize("c, delta", [(1, 0.2), (2, 0.0), (2, 1.0)])
    def test_invalid(self, c, delta):
        """Test out-of-range parameters raise."""
        with pytest.raises(InvalidParameterError):
            build_multiclass_partition(c, delta, 2)


class TestMulticlassMap:
    """Tests for the joined multiclass map."""

    def test_slab_values(self, two_circles):
        """Test each slab maps onto its own circle."""
        out = two_circles.evaluate([[-1.0], [1.0]])
        assert np.allclose(out, [[-2.5, 0.0], [0.5, 0.0]])

    def test_gap_interpolates(self, two_circles):
        """Test the gap midpoint is the average of the two faces."""
        mid = two_circles.evaluate([[0.0]])[0]
        left = two_circles.evaluate([[-0.1]])[0]
        right = two_circles.evaluate([[0.1]])[0]
        assert np.allclose(mid, 0.5 * (left + right))

    def test_continuity(self, two_circles):
        """Test the map is continuous across slab faces."""
        result = face_continuity(two_circles, 16, seed=0)
        assert result.continuous
        assert result.max_jump < 1e-5

    def test_outside_cube(self, two_circles):
        """Test latents outside I_d raise."""
        with pytest.raises(InvalidParameterError):
            two_circles.evaluate([[1.5]])

    def test_generator_count(self, unit_circle):
        """Test the wrong number of generators raises."""
        partition = build_multiclass_partition(3, 0.2, 1)
        with pytest.raises(InvalidParameterError):
            build_multiclass_map(partition, [build_generator(unit_circle, 1.0)] * 2)

    def test_ambient_mismatch(self, unit_circle, clifford):
        """Test generators with different ambient dimensions raise."""
        partition = build_multiclass_partition(2, 0.2, 1)
        gens = [build_generator(unit_circle, 1.0), build_generator(unit_circle, 1.0)]
        build_multiclass_map(partition, gens)
        partition2 = build_multiclass_partition(2, 0.2, 2)
        with pytest.raises(ShapeError):
            build_multiclass_map(
                partition2,
                [build_generator(clifford, 1.0), build_generator(get_manifold("sphere"), 1.0)],
            )
