"""Tests for metric_geometry module."""

import numpy as np
import pytest
from scipy.spatial.distance import directed_hausdorff as scipy_directed

from manifoldlab.exceptions import InvalidParameterError, ResourceError, ShapeError
from manifoldlab.metric_geometry import (
    GridIndex,
    PointCloud,
    brute_force_directed,
    brute_force_hausdorff,
    directed_hausdorff,
    hausdorff,
    median_spacing,
    net_fineness,
)


def random_cloud_pair(rng, kind):
    """
    Two clouds of up to 2000 points in a random dimension from 1 to 8.

    ``kind`` 0 draws normal clouds, 1 draws clustered clouds with one far
    outlier in the query cloud and 2 draws integer lattice points with ties.
    """
    dim = int(rng.integers(1, 9))
    n, m = (int(v) for v in rng.integers(2, 2001, size=2))
    if kind == 0:
        return rng.normal(size=(n, dim)), rng.normal(size=(m, dim)) + 0.3
    if kind == 1:
        centers = rng.uniform(-5, 5, (4, dim))
        x = centers[rng.integers(0, 4, n)] + 0.1 * rng.normal(size=(n, dim))
        y = centers[rng.integers(0, 4, m)] + 0.1 * rng.normal(size=(m, dim))
        x[0] = 100.0
        return x, y
    x = rng.integers(-4, 5, (n, dim)).astype(np.float64)
    y = rng.integers(-4, 5, (m, dim)).astype(np.float64)
    return x, y


class TestHausdorff:
    """Tests for exact Hausdorff distances."""

    def test_asymmetric_directed(self):
        """Test directed distances differ for nested sets."""
        x = [[0.0], [10.0]]
        y = [[0.0]]
        assert directed_hausdorff(x, y) == 10.0
        assert directed_hausdorff(y, x) == 0.0
        assert hausdorff(x, y) == 10.0

    def test_identical_clouds(self, rng):
        """Test d_H(X, X) = 0."""
        x = rng.normal(size=(200, 3))
        assert hausdorff(x, x) == 0.0

    def test_symmetric(self, rng):
        """Test d_H(X, Y) = d_H(Y, X)."""
        x, y = rng.normal(size=(150, 2)), rng.normal(size=(90, 2))
        assert hausdorff(x, y) == hausdorff(y, x)

    def test_triangle_inequality(self, rng):
        """Test d_H(X, Z) <= d_H(X, Y) + d_H(Y, Z) on random triples."""
        for _ in range(100):
            dim = int(rng.integers(1, 9))
            x, y, z = (rng.normal(size=(int(rng.integers(5, 200)), dim)) for _ in range(3))
            assert hausdorff(x, z) <= hausdorff(x, y) + hausdorff(y, z) + 1e-12
            assert hausdorff(x, y) == hausdorff(y, x)

    def test_matches_brute_force_exactly(self, rng):
        """Test the grid path agrees with the exhaustive oracle bit for bit."""
        x = rng.uniform(-1, 1, (700, 3))
        y = rng.uniform(-1, 1, (500, 3))
        assert directed_hausdorff(x, y) == brute_force_directed(x, y)
        assert hausdorff(x, y) == brute_force_hausdorff(x, y)

    def test_matches_brute_force_on_random_instances(self):
        """Test exact agreement with the oracle over varied clouds in dims 1 to 8."""
        mismatches = []
        for k in range(200):
            x, y = random_cloud_pair(np.random.default_rng(k), kind=k % 3)
            if hausdorff(x, y) != brute_force_hausdorff(x, y):
                mismatches.append(k)
        assert mismatches == []

    def test_matches_scipy(self, rng):
        """Test agreement with scipy's directed Hausdorff."""
        x = rng.normal(size=(300, 4))
        y = rng.normal(size=(250, 4)) + 0.5
        assert directed_hausdorff(x, y) == pytest.approx(scipy_directed(x, y)[0], rel=1e-12)

    def test_far_outlier_falls_back(self, rng):
        """Test queries far from every bucket still get the exact distance."""
        y = rng.uniform(0, 1, (400, 2))
        x = np.vstack([y[:10], [[50.0, 50.0]]])
        assert directed_hausdorff(x, y) == brute_force_directed(x, y)

    def test_high_dimension(self, rng):
        """Test dimensions beyond the offset enumeration limit."""
        x, y = rng.normal(size=(80, 6)), rng.normal(size=(60, 6))
        assert directed_hausdorff(x, y) == brute_force_directed(x, y)

    def test_duplicate_targets(self):
        """Test a degenerate target spacing uses the exhaustive path."""
        y = np.zeros((5, 2))
        assert not GridIndex(y).usable
        assert directed_hausdorff([[3.0, 4.0]], y) == 5.0

    def test_point_cloud_input(self):
        """Test PointCloud arguments are accepted."""
        a = PointCloud.from_points([[0.0, 0.0]])
        b = PointCloud.from_points([[0.0, 2.0]])
        assert hausdorff(a, b) == 2.0

    def test_empty_cloud(self):
        """Test empty clouds raise."""
        with pytest.raises(InvalidParameterError):
            hausdorff(np.empty((0, 2)), [[0.0, 0.0]])

    def test_dimension_mismatch(self):
        """Test ambient dimension mismatch raises."""
        with pytest.raises(ShapeError):
            hausdorff([[0.0, 0.0]], [[0.0, 0.0, 0.0]])

    def test_brute_force_cap(self):
        """Test oversize brute force raises."""
        with pytest.raises(ResourceError):
            brute_force_hausdorff(np.zeros((5000, 1)), np.zeros((3000, 1)))


class TestPointCloud:
    """Tests for PointCloud."""

    def test_reshapes_vector(self):
        """Test a 1-d array becomes a column."""
        cloud = PointCloud(np.array([1.0, 2.0, 3.0]))
        assert cloud.points.shape == (3, 1)
        assert len(cloud) == 3
        assert cloud.dim == 1

    def test_rejects_non_finite(self):
        """Test NaN coordinates raise."""
        with pytest.raises(InvalidParameterError):
            PointCloud(np.array([[0.0, np.nan]]))

    def test_rejects_rank3(self):
        """Test 3-d arrays raise."""
        with pytest.raises(ShapeError):
            PointCloud(np.zeros((2, 2, 2)))

    def test_csv_round_trip(self, tmp_path, rng):
        """Test CSV output reads back exactly."""
        cloud = PointCloud(rng.normal(size=(20, 3)), label="target")
        path = cloud.to_csv(tmp_path / "nested" / "cloud.csv")
        back = PointCloud.from_csv(path)
        assert np.array_equal(back.points, cloud.points)
        assert back.label == "target"

    def test_csv_header(self, tmp_path):
        """Test the header names dimension and label."""
        path = PointCloud(np.zeros((1, 2)), label="x").to_csv(tmp_path / "c.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# dim=2"
        assert lines[1] == "# label=x"

    def test_csv_dimension_mismatch(self, tmp_path):
        """Test a header disagreeing with the columns raises."""
        path = tmp_path / "bad.csv"
        path.write_text("# dim=3\n# label=\n1,2\n", encoding="utf-8")
        with pytest.raises(ShapeError):
            PointCloud.from_csv(path)


class TestFineness:
    """Tests for net fineness and spacing."""

    def test_fineness(self):
        """Test largest nearest-neighbour gap."""
        assert net_fineness([[0.0], [1.0], [3.0]]) == 2.0

    def test_single_point(self):
        """Test one point has fineness 0."""
        assert net_fineness([[1.0, 1.0]]) == 0.0

    def test_median_spacing_regular_grid(self):
        """Test spacing of an evenly spaced line."""
        pts = np.linspace(0.0, 1.0, 11)[:, None]
        assert median_spacing(pts) == pytest.approx(0.1)
