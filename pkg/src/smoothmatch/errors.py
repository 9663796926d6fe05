"""Exception hierarchy shared by all modules."""


class SmoothMatchError(Exception):
    """Base class for errors raised by this package."""


class ParameterDomainError(SmoothMatchError, ValueError):
    """A model or estimator parameter lies outside its admissible domain."""


class ConfigurationError(SmoothMatchError, ValueError):
    """Invalid experiment or estimator configuration."""


class NumericalError(SmoothMatchError, ArithmeticError):
    """Base class for numerical failures."""


class DegenerateSampleError(NumericalError):
    """The sample carries no usable information for the estimator."""


class DivergenceError(NumericalError):
    """A simulated path reached a non-finite state."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"non-finite state at step {step}")


class SingularStepError(NumericalError):
    """Newton step requested where the estimating-function derivative vanishes."""
