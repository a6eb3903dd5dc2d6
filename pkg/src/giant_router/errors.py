"""Exception hierarchy shared by the router modules."""


class RouterError(Exception):
    """Base class for every error raised by :mod:`giant_router`."""


class ConfigError(RouterError, ValueError):
    """A router description violates a structural invariant."""


class BandEdgeError(RouterError, ValueError):
    """A wavenumber or energy sits on (or too close to) a band edge.

    At ``k = 0`` or ``k = pi`` the group velocity vanishes and no scattering
    state carries flux, so these points are rejected rather than evaluated.
    """


class SingularPotentialError(RouterError, ZeroDivisionError):
    """The effective potentials diverge because ``E**2 == Omega**2``."""


class AnalyticAssumptionError(RouterError, ValueError):
    """The closed forms need equal hoppings/detunings and a supported layout."""


class NumericalDegeneracyError(RouterError, ArithmeticError):
    """The lattice linear system is singular at the requested point."""

    def __init__(self, message, k=None, config=None):
        super().__init__(message)
        self.k = k
        self.config = config


class FluxViolationError(RouterError, ArithmeticError):
    """A computed spectrum row breaks probability-flux conservation."""
