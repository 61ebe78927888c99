"""Custom exceptions for ManifoldLab library."""

from typing import Optional, Sequence


class ManifoldLabError(Exception):
    """Base exception for ManifoldLab."""

    pass


class InvalidParameterError(ManifoldLabError):
    """Invalid parameter value."""

    pass


class ShapeError(InvalidParameterError):
    """Array shape or dimension mismatch."""

    pass


class ConfigError(InvalidParameterError):
    """Experiment configuration violates the schema."""

    def __init__(self, message: str, offending_keys: Sequence[str] = ()) -> None:
        self.offending_keys = list(offending_keys)
        if self.offending_keys:
            message = f"{message} (offending keys: {', '.join(self.offending_keys)})"
        super().__init__(message)


class CalculationError(ManifoldLabError):
    """Error during calculation."""

    pass


class ChartDomainError(CalculationError):
    """Point or region outside the chart domain of a manifold."""

    def __init__(self, message: str, coordinate: Optional[int] = None) -> None:
        self.coordinate = coordinate
        super().__init__(message)


class SingularityError(CalculationError):
    """Metric tensor is singular (pivot below tolerance)."""

    pass


class GeodesicEscapeError(CalculationError):
    """Geodesic left a non-periodic chart domain."""

    def __init__(self, message: str, exit_time: float) -> None:
        self.exit_time = exit_time
        super().__init__(message)


class ConnectivityError(CalculationError):
    """Nearest-neighbor graph is disconnected."""

    pass


class DivergenceError(CalculationError):
    """Training loss became NaN or infinite."""

    def __init__(self, message: str, epoch: int) -> None:
        self.epoch = epoch
        super().__init__(message)


class PrecisionError(CalculationError):
    """Requested tolerance is below the attainable numerical resolution."""

    pass


class ResourceError(CalculationError):
    """Computation would exceed a configured size cap."""

    pass
