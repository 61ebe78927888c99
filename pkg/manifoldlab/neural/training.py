"""Mean-squared-error regression training."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Literal, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from manifoldlab.exceptions import DivergenceError, InvalidParameterError, ShapeError
from manifoldlab.neural.network import NetworkSpec

logger = logging.getLogger(__name__)

OptimizerKind = Literal["sgd", "momentum", "adam"]
OPTIMIZERS: tuple[str, ...] = ("sgd", "momentum", "adam")


@dataclass
class TrainConfig:
    """
    Training hyper-parameters.

    Attributes
    ----------
    learning_rate : float
        Step size, > 0.
    epochs : int
        Passes over the dataset. Zero evaluates the untrained network.
    batch_size : int
        Mini-batch size; the last batch of an epoch may be smaller.
    seed : int
        Shuffle seed.
    optimizer : {"sgd", "momentum", "adam"}
        Update rule.
    momentum : float
        beta for "momentum", beta1 for "adam".
    target_loss : float
        Stop once the full-dataset MSE is at or below this value.
    log_every : int
        Epoch interval for DEBUG loss logging.
    """

    learning_rate: float = 1e-2
    epochs: int = 1000
    batch_size: int = 256
    seed: int = 0
    optimizer: OptimizerKind = "adam"
    momentum: float = 0.9
    target_loss: float = 0.0
    log_every: int = 100

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        """Raise InvalidParameterError on out-of-range values."""
        if not self.learning_rate > 0:
            raise InvalidParameterError(
                f"learning_rate must be positive, got {self.learning_rate}"
            )
        if self.epochs < 0:
            raise InvalidParameterError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise InvalidParameterError(f"batch_size must be positive, got {self.batch_size}")
        if self.optimizer not in OPTIMIZERS:
            raise InvalidParameterError(
                f"Unknown optimizer '{self.optimizer}'. Available: {', '.join(OPTIMIZERS)}"
            )
        if not 0 <= self.momentum < 1:
            raise InvalidParameterError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.target_loss < 0:
            raise InvalidParameterError(
                f"target_loss must be nonnegative, got {self.target_loss}"
            )
        if self.log_every < 1:
            raise InvalidParameterError(f"log_every must be positive, got {self.log_every}")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


class Optimizer:
    """In-place parameter update rule."""

    def __init__(self, params: list[NDArray[np.float64]], learning_rate: float) -> None:
        self.params = params
        self.learning_rate = learning_rate

    def step(self, grads: list[NDArray[np.float64]]) -> None:
        raise NotImplementedError


class SGD(Optimizer):
    """Plain gradient descent."""

    def step(self, grads: list[NDArray[np.float64]]) -> None:
        for p, g in zip(self.params, grads):
            p -= self.learning_rate * g


class Momentum(Optimizer):
    """Heavy-ball momentum: v <- beta v + g, p <- p - lr v."""

    def __init__(
        self, params: list[NDArray[np.float64]], learning_rate: float, beta: float = 0.9
    ) -> None:
        super().__init__(params, learning_rate)
        self.beta = beta
        self.velocity = [np.zeros_like(p) for p in params]

    def step(self, grads: list[NDArray[np.float64]]) -> None:
        for p, v, g in zip(self.params, self.velocity, grads):
            v *= self.beta
            v += g
            p -= self.learning_rate * v


class Adam(Optimizer):
    """Adam with bias-corrected first and second moments."""

    def __init__(
        self,
        params: list[NDArray[np.float64]],
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        super().__init__(params, learning_rate)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[NDArray[np.float64]]) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, m, v, g in zip(self.params, self.m, self.v, grads):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.learning_rate * (m / c1) / (np.sqrt(v / c2) + self.eps)


def make_optimizer(params: list[NDArray[np.float64]], config: TrainConfig) -> Optimizer:
    """Optimizer named by ``config.optimizer``."""
    if config.optimizer == "sgd":
        return SGD(params, config.learning_rate)
    if config.optimizer == "momentum":
        return Momentum(params, config.learning_rate, config.momentum)
    return Adam(params, config.learning_rate, beta1=config.momentum)


def mse(predictions: NDArray[np.float64], targets: NDArray[np.float64]) -> float:
    """Mean over all entries of (prediction - target)^2."""
    return float(np.mean((predictions - targets) ** 2))


@dataclass
class TrainingResult:
    """
    Outcome of :func:`train_regression`.

    Attributes
    ----------
    network : NetworkSpec
        Trained copy; the input network is left untouched.
    loss_history : list of float
        Full-dataset MSE before training, then after every epoch.
    epochs_run : int
        Epochs actually performed.
    converged : bool
        Whether ``target_loss`` was reached.
    """

    network: NetworkSpec
    loss_history: list[float] = field(default_factory=list)
    epochs_run: int = 0
    converged: bool = False

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1]


def _check_dataset(
    net: NetworkSpec, inputs: ArrayLike, targets: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    x = np.asarray(inputs, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if x.shape[0] == 0:
        raise InvalidParameterError("dataset must be nonempty")
    x = x.reshape(x.shape[0], -1)
    y = y.reshape(y.shape[0], -1)
    if x.shape[0] != y.shape[0]:
        raise ShapeError(f"{x.shape[0]} inputs but {y.shape[0]} targets")
    if x.shape[1] != net.input_dim:
        raise ShapeError(f"inputs have {x.shape[1]} values, network expects {net.input_dim}")
    if y.shape[1] != net.output_dim:
        raise ShapeError(
            f"targets have {y.shape[1]} values, network outputs {net.output_dim}"
        )
    return x, y


def train_regression(
    net: NetworkSpec,
    inputs: ArrayLike,
    targets: ArrayLike,
    config: Optional[TrainConfig] = None,
) -> TrainingResult:
    """
    Fit ``net`` to (input, target) pairs by minimising mean squared error.

    Each epoch visits a seeded permutation of the dataset in mini-batches,
    so two runs with the same config give bit-identical parameters.

    Parameters
    ----------
    net : NetworkSpec
        Initial network (copied, not modified).
    inputs : array_like
        Shape ``(N, input_dim)``.
    targets : array_like
        Shape ``(N, output_dim)``.
    config : TrainConfig, optional
        Hyper-parameters.

    Returns
    -------
    TrainingResult

    Raises
    ------
    ShapeError
        If the dataset does not match the network.
    DivergenceError
        If the loss becomes NaN or infinite.
    """
    config = config or TrainConfig()
    x, y = _check_dataset(net, inputs, targets)
    model = net.copy()
    optimizer = make_optimizer(model.parameters(), config)
    rng = np.random.default_rng(config.seed)
    n = x.shape[0]
    scale = 2.0 / model.output_dim

    history = [mse(model.forward(x), y)]
    converged = history[0] <= config.target_loss
    epoch = 0
    while epoch < config.epochs and not converged:
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            out, cache = model.forward_cached(x[idx])
            residual = scale * (out - y[idx]) / idx.size
            grads = model.backward_cached(cache, residual)
            optimizer.step([g for pair in zip(grads.weights, grads.biases) for g in pair])
        epoch += 1
        loss = mse(model.forward(x), y)
        if not np.isfinite(loss):
            raise DivergenceError(f"training loss is {loss} after epoch {epoch}", epoch)
        history.append(loss)
        converged = loss <= config.target_loss
        if epoch % config.log_every == 0:
            logger.debug("epoch %d: mse %.6e", epoch, loss)

    logger.info("trained %d epochs, final mse %.6e", epoch, history[-1])
    return TrainingResult(network=model, loss_history=history, epochs_run=epoch, converged=converged)


def max_pointwise_error(
    net: NetworkSpec, inputs: ArrayLike, targets: ArrayLike
) -> float:
    """max_i ||f(x_i) - y_i|| over a dataset."""
    x, y = _check_dataset(net, inputs, targets)
    return float(np.max(np.linalg.norm(net.forward(x) - y, axis=1)))
