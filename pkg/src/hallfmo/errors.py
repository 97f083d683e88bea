"""Exception hierarchy shared by all modules."""


class HallFMOError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(HallFMOError, ValueError):
    """Invalid mesh, region, parameter or run configuration."""


class EmptyRegionError(ConfigurationError):
    """A region specification selected no element."""


class WellPosednessError(HallFMOError):
    """The boundary value problem has no unique solution (no Dirichlet edge)."""


class DomainError(HallFMOError, ValueError):
    """A design value lies outside [-1, 1]."""


class AssemblyError(HallFMOError):
    """A conductivity tensor with a non positive-definite symmetric part."""


class NumericalError(HallFMOError):
    """Linear solver failure or residual above tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
