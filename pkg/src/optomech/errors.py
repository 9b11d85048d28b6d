"""Exception types raised by the simulation routines."""


class OptomechError(Exception):
    """Base class for all library errors."""


class Diverged(OptomechError):
    """An integration blew past the divergence guard."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NotConverged(OptomechError):
    """A trajectory tail is not periodic to the requested tolerance."""


class ResonantDenominator(OptomechError):
    pass


class RealityViolation(OptomechError):
    pass


class FrequencyMismatch(OptomechError):
    pass


class Unstable(OptomechError):
    """The monodromy matrix has spectral radius >= 1."""


class SolveFailed(OptomechError):
    pass


class Unphysical(OptomechError):
    """A covariance matrix violates the uncertainty principle beyond tolerance."""


class NumericalDomain(OptomechError):
    pass


class ConfigError(OptomechError):
    pass
