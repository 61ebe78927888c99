"""Feedforward networks written on NumPy: layers, backpropagation and training."""

from manifoldlab.neural.activations import ActivationKind
from manifoldlab.neural.checkpoint import load_network, save_network
from manifoldlab.neural.gradcheck import (
    GradientCheck,
    gradient_check,
    numeric_jacobian,
    relative_error,
)
from manifoldlab.neural.layers import (
    Conv2D,
    ConvTranspose2D,
    FullyConnected,
    Layer,
    circular_conv,
    circular_conv_adjoint,
    conv_output_size,
)
from manifoldlab.neural.network import (
    Gradients,
    NetworkSpec,
    build_network,
    init_conv,
    init_conv_transpose,
    init_fully_connected,
    mlp,
)
from manifoldlab.neural.training import (
    TrainConfig,
    TrainingResult,
    max_pointwise_error,
    mse,
    train_regression,
)

__all__ = [
    # Layers
    "ActivationKind",
    "Layer",
    "FullyConnected",
    "Conv2D",
    "ConvTranspose2D",
    "circular_conv",
    "circular_conv_adjoint",
    "conv_output_size",
    # Networks
    "NetworkSpec",
    "Gradients",
    "mlp",
    "build_network",
    "init_fully_connected",
    "init_conv",
    "init_conv_transpose",
    # Training
    "TrainConfig",
    "TrainingResult",
    "train_regression",
    "mse",
    "max_pointwise_error",
    # Checks and persistence
    "GradientCheck",
    "gradient_check",
    "numeric_jacobian",
    "relative_error",
    "save_network",
    "load_network",
]
