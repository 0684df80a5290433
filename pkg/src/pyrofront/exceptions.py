"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """Inconsistent solver configuration (CFL, unresolved kernel, grid mismatch)."""


class BlowUp(ArithmeticError):
    """The evolution left the representable range.

    Carries the simulation time at which non-finite or huge values appeared,
    so callers can end a trajectory instead of crashing.
    """

    def __init__(self, time, message=None):
        self.time = float(time)
        super().__init__(message or f"solution blew up at t={self.time:.6g}")


class NumericalFailure(ArithmeticError):
    """A fixed-point iterate produced NaN values."""


class WitnessUnavailable(ValueError):
    """No positive interval of the profile lies inside the lower kernel radius."""
