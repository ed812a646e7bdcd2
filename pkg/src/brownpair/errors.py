"""Exception hierarchy shared by all modules."""


class BrownPairError(Exception):
    """Base class for every error raised by the package."""


class DomainError(BrownPairError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConfigError(BrownPairError, ValueError):
    """A scenario configuration is malformed or inconsistent.

    ``field`` names the offending key when there is one.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class NumericalError(BrownPairError, ArithmeticError):
    """A computation produced non-finite or inconsistent numbers."""

    def __init__(self, message, t=None, diagnostics=None):
        if t is not None:
            message = f"t={t:.6g}: {message}"
        super().__init__(message)
        self.t = t
        self.diagnostics = diagnostics or {}


class DegenerateTimeError(NumericalError):
    """Propagation time is below ``t_min`` (the propagator is a delta sequence)."""


class InvalidPropagationError(NumericalError):
    """The Gaussian integral over the initial variables does not converge."""
