"""Tests for embedding module."""

import numpy as np
import pytest

from manifoldlab.embedding import (
    Verdict,
    build_conv_matrix,
    check_layer,
    check_network_injectivity,
    check_network_layers,
    check_restricted_injectivity,
    delta_kernel,
    linear_matrix,
    loop_witness,
    numeric_rank,
    rank_is_stable,
    reads_every_input,
)
from manifoldlab.exceptions import InvalidParameterError, ShapeError
from manifoldlab.manifolds import circle, get_manifold
from manifoldlab.neural import (
    Conv2D,
    ConvTranspose2D,
    FullyConnected,
    NetworkSpec,
    circular_conv,
    init_conv,
    init_conv_transpose,
    mlp,
)


class TestConvMatrix:
    """Tests for explicit convolution matrices."""

    @pytest.mark.parametrize("m, k, l, s, t", [(3, 1, 2, 2, 1), (4, 2, 3, 3, 1), (5, 2, 2, 2, 2)])
    def test_matches_convolution(self, rng, m, k, l, s, t):
        """Test the matrix reproduces circular convolution."""
        layer = init_conv(m, k, l, s, t, "tanh", rng)
        x = rng.normal(size=(1, k, m, m))
        expected = circular_conv(x, layer.kernel, t).ravel()
        assert np.allclose(build_conv_matrix(layer).apply(x), expected, atol=1e-12)

    def test_shape(self, rng):
        """Test (n^2 l, m^2 k)."""
        layer = init_conv(5, 2, 3, 2, 2, "tanh", rng)
        assert build_conv_matrix(layer).shape == (9 * 3, 25 * 2)

    def test_transpose_duality(self, rng):
        """Test the transposed layer matrix is the exact transpose."""
        layer = init_conv_transpose(4, 3, 2, 2, 2, "tanh", rng)
        forward = build_conv_matrix(layer.matching_conv()).matrix
        assert np.array_equal(build_conv_matrix(layer).matrix, forward.T)

    def test_delta_kernel_identity(self):
        """Test the delta kernel gives the identity at stride one."""
        layer = Conv2D("identity", delta_kernel(2, 2, 3), np.zeros(2), 4, 1)
        assert np.array_equal(build_conv_matrix(layer).matrix, np.eye(32))

    def test_delta_kernel_validation(self):
        """Test non-positive sizes raise."""
        with pytest.raises(InvalidParameterError):
            delta_kernel(0, 1, 1)

    def test_rejects_dense(self):
        """Test dense layers are not convolutions."""
        layer = FullyConnected("tanh", np.eye(2), np.zeros(2))
        with pytest.raises(InvalidParameterError):
            build_conv_matrix(layer)
        assert np.array_equal(linear_matrix(layer), np.eye(2))

    def test_reads_every_input(self):
        """Test strided coverage of input pixels."""
        assert not reads_every_input(4, 1, 2)
        assert reads_every_input(4, 2, 2)
        assert reads_every_input(5, 2, 2)
        with pytest.raises(ShapeError):
            reads_every_input(2, 3, 1)


class TestNumericRank:
    """Tests for complete-pivoting rank."""

    def test_identity(self):
        """Test full rank."""
        report = numeric_rank(np.eye(5))
        assert report.numeric_rank == 5
        assert report.full_rank
        assert rank_is_stable(report)

    def test_rank_one(self):
        """Test an outer product has rank one."""
        report = numeric_rank(np.outer([1.0, 2.0, 3.0], [4.0, 5.0]))
        assert report.numeric_rank == 1
        assert not report.full_rank

    def test_zero_matrix(self):
        """Test the zero matrix has rank zero."""
        report = numeric_rank(np.zeros((3, 2)))
        assert report.numeric_rank == 0
        assert report.min_retained_pivot == 0.0

    def test_explicit_tolerance(self):
        """Test a tolerance above a pivot drops it."""
        report = numeric_rank(np.diag([1.0, 1e-3]), tolerance=1e-2)
        assert report.numeric_rank == 1
        assert report.rank_at(1e-4) == 2

    def test_non_finite(self):
        """Test NaN entries raise."""
        with pytest.raises(InvalidParameterError):
            numeric_rank(np.array([[np.nan]]))

    def test_to_dict(self):
        """Test serialisable report."""
        assert numeric_rank(np.eye(2)).to_dict()["shape"] == [2, 2]


class TestCheckLayer:
    """Tests for layer embedding verdicts."""

    def test_dense_embedding(self):
        """Test an expanding dense layer."""
        layer = FullyConnected("tanh", np.array([[1.0], [0.0]]), np.zeros(2))
        result = check_layer(layer, trials=5, seed=0)
        assert result.verdict is Verdict.EMBEDDING
        assert result.is_embedding
        assert result.to_dict()["verdict"] == "embedding"

    def test_dense_not_expanding(self):
        """Test a shrinking layer."""
        layer = FullyConnected("tanh", np.ones((1, 2)), np.zeros(1))
        result = check_layer(layer, trials=5, seed=0)
        assert result.verdict is Verdict.NOT_EXPANDING
        assert not result.expanding

    def test_singular_weights(self):
        """Test rank-deficient actual weights are reported."""
        layer = FullyConnected("tanh", np.zeros((3, 2)), np.zeros(3))
        result = check_layer(layer, trials=5, seed=0)
        assert result.verdict is Verdict.RANK_DEFICIENT
        assert result.actual_rank == 0
        assert result.deficient_trials == 0

    def test_conv_embedding(self, rng):
        """Test an expanding stride-one conv layer."""
        layer = init_conv(3, 1, 2, 2, 1, "sigmoid", rng)
        result = check_layer(layer, trials=10, seed=1)
        assert result.verdict is Verdict.EMBEDDING
        assert result.input_dim == 9
        assert result.output_dim == 18

    def test_conv_skipping_pixels(self, rng):
        """Test a stride that skips input pixels cannot be injective."""
        layer = init_conv(4, 1, 4, 1, 2, "tanh", rng)
        result = check_layer(layer, trials=5, seed=0)
        assert result.expanding
        assert result.verdict is Verdict.RANK_DEFICIENT
        assert result.deficient_trials == 5

    @pytest.mark.parametrize("m, s", [(3, 2), (3, 3), (5, 3)])
    def test_strided_conv_generic_embedding(self, rng, m, s):
        """Test strided one-to-three channel shapes stay full rank on every redraw."""
        layer = init_conv(m, 1, 3, s, 2, "tanh", rng)
        assert reads_every_input(m, s, 2)
        result = check_layer(layer, trials=100, seed=0)
        assert result.verdict is Verdict.EMBEDDING
        assert result.deficient_trials == 0

    def test_strided_conv_always_deficient(self, rng):
        """Test a shape reading every pixel can still be deficient on every draw."""
        layer = init_conv(5, 1, 3, 2, 2, "tanh", rng)
        assert reads_every_input(5, 2, 2)
        result = check_layer(layer, trials=20, seed=0)
        assert result.expanding
        assert result.verdict is Verdict.RANK_DEFICIENT
        assert result.deficient_trials == 20

    def test_transposed_embedding(self, rng):
        """Test an expanding transposed conv."""
        layer = init_conv_transpose(4, 2, 1, 2, 2, "tanh", rng)
        assert isinstance(layer, ConvTranspose2D)
        assert check_layer(layer, trials=10, seed=2).verdict is Verdict.EMBEDDING

    def test_deterministic(self, rng):
        """Test equal seeds give equal verdicts."""
        layer = init_conv(4, 1, 1, 2, 1, "tanh", rng)
        assert check_layer(layer, 8, seed=3).to_dict() == check_layer(layer, 8, seed=3).to_dict()

    def test_invalid_trials(self):
        """Test zero trials raises."""
        with pytest.raises(InvalidParameterError):
            check_layer(FullyConnected("tanh", np.eye(1), np.zeros(1)), trials=0)

    def test_network_layers(self):
        """Test per-layer verdicts of a network."""
        net = mlp(2, [4], 1, seed=0)
        verdicts = [v.verdict for v in check_network_layers(net, trials=3, seed=0)]
        assert verdicts == [Verdict.EMBEDDING, Verdict.NOT_EXPANDING]


class TestNetworkInjectivity:
    """Tests for network-level evidence."""

    def test_expanding_network(self):
        """Test an expanding tanh network keeps full Jacobian rank."""
        net = mlp(2, [8], 16, output_activation="tanh", seed=0)
        report = check_network_injectivity(net, 30, seed=0)
        assert report.precondition_ok
        assert report.min_rank == 2
        assert report.rank_deficient_points == 0
        assert report.distinct_outputs
        assert report.immersion_at_samples
        assert "ranks" not in report.to_dict()

    def test_bottleneck_detected(self):
        """Test a width-one bottleneck breaks the precondition and the rank."""
        net = mlp(2, [8, 1], 8, seed=0)
        report = check_network_injectivity(net, 20, seed=0)
        assert not report.precondition_ok
        assert 1 in report.non_expanding_layers
        assert report.min_rank <= 1
        assert not report.immersion_at_samples

    def test_explicit_points(self, rng):
        """Test explicit sample points."""
        net = mlp(2, [8], 8, seed=1)
        report = check_network_injectivity(net, rng.uniform(-1, 1, (5, 2)))
        assert len(report.ranks) == 5


class TestRestricted:
    """Tests for restriction to latent submanifolds."""

    def test_latent_circle(self):
        """Test the composite Jacobian keeps rank one on a latent circle."""
        net = mlp(2, [16], 16, output_activation="tanh", seed=0)
        result = check_restricted_injectivity(net, circle(radius=0.9), 64, seed=0)
        assert result.min_rank == 1
        assert result.immersion_at_samples
        assert result.min_output_separation > 0
        assert result.to_dict()["manifold"] == "circle(r=0.9)"

    def test_dimension_mismatch(self):
        """Test a latent manifold in the wrong ambient space raises."""
        with pytest.raises(ShapeError):
            check_restricted_injectivity(mlp(2, [4], 4, seed=0), get_manifold("sphere"))

    def test_loop_identity(self):
        """Test the identity maps the circle to a simple closed loop."""
        net = NetworkSpec([FullyConnected("identity", np.eye(2), np.zeros(2))])
        witness = loop_witness(net, resolution=64)
        assert witness.simple_closed
        assert witness.closing_gap == pytest.approx(witness.max_step)
        assert witness.to_dict()["simple_closed"] is True

    def test_loop_collapsed(self):
        """Test a constant map is not a simple loop."""
        net = NetworkSpec([FullyConnected("identity", np.zeros((2, 2)), np.ones(2))])
        assert not loop_witness(net, resolution=32).simple_closed

    def test_loop_needs_two_inputs(self):
        """Test one-dimensional inputs raise."""
        with pytest.raises(ShapeError):
            loop_witness(mlp(1, [2], 2, seed=0))

    def test_loop_resolution(self):
        """Test too few samples raise."""
        with pytest.raises(InvalidParameterError):
            loop_witness(mlp(2, [2], 2, seed=0), resolution=5, window=2)
