"""Exception hierarchy shared across the package."""


class GmkiError(Exception):
    """Base class for all errors raised by this package."""


class FactorizationError(GmkiError):
    """A matrix that must be symmetric positive definite failed to factorize."""


class DegenerateWeightsError(GmkiError):
    """All mixture log-weights are -inf; the mixture carries no mass."""


class ExplorationDegeneracyError(GmkiError):
    """The exploration half-step produced a non-factorizable covariance."""

    def __init__(self, component: int, message: str = ""):
        self.component = component
        super().__init__(message or f"exploration covariance degenerate for component {component}")


class ExploitationDegeneracyError(GmkiError):
    """The Kalman half-step produced a non-factorizable covariance."""

    def __init__(self, component: int, message: str = ""):
        self.component = component
        super().__init__(message or f"updated covariance indefinite for component {component}")


class StepSizeError(GmkiError):
    """A gradient-flow Euler step destroyed positive definiteness; reduce the step size."""


class SolverBlowUpError(GmkiError):
    """The PDE solver produced NaN/Inf fields."""

    def __init__(self, time_reached: float):
        self.time_reached = time_reached
        super().__init__(f"solution blew up at t = {time_reached:g}")


class ConfigError(GmkiError):
    """Malformed configuration or unknown benchmark/key."""
