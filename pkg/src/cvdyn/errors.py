"""Exception hierarchy shared by all cvdyn modules."""


class CvdynError(Exception):
    """Base class for package errors."""


class DomainError(CvdynError, ValueError):
    """Argument outside the domain of a function."""


class SingularityError(DomainError):
    """Argument sits on a singular point (e.g. Ei at the origin)."""


class RangeError(CvdynError, OverflowError):
    """Result would not be representable as a double."""


class ConfigurationError(CvdynError, ValueError):
    """Invalid run, grid or CLI configuration."""


class ContractError(CvdynError, ValueError):
    """Input violates a structural precondition (symmetry, block layout)."""


class NotApplicableError(ContractError):
    """Formula is restricted to a class of states the input is not in."""


class ConvergenceError(CvdynError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes
    ----------
    quantity : str
        Name of the coefficient or kernel being integrated.
    t : float
        Time at which the failure happened.
    achieved : float
        Absolute error estimate reported by the integrator.
    requested : float
        Absolute tolerance that was asked for.
    """

    def __init__(self, quantity, t, achieved, requested):
        self.quantity = quantity
        self.t = t
        self.achieved = achieved
        self.requested = requested
        super().__init__(
            f"{quantity} at t={t:g}: quadrature error estimate {achieved:.3e} "
            f"exceeds requested tolerance {requested:.3e}"
        )
