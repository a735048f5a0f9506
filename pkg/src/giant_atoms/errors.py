"""Exception and warning types raised across the package."""


class GiantAtomError(Exception):
    """Base class for all package errors."""


class InvalidLayoutError(GiantAtomError, ValueError):
    """Coupling points are malformed, coincide, or fall outside the lattice."""


class UnsupportedLayoutError(GiantAtomError, ValueError):
    """A valid layout that the requested operation does not handle."""


class DomainError(GiantAtomError, ValueError):
    """Argument outside the domain of a function (e.g. a detuning outside the band)."""


class BandEdgeDivergence(GiantAtomError, ArithmeticError):
    """Evaluation exactly at a band edge, where the density of states diverges."""


class BranchPointError(GiantAtomError, ArithmeticError):
    """Evaluation at one of the branch points z = +-2J."""


class PoleEvaluationError(GiantAtomError, ZeroDivisionError):
    """A Green's function was evaluated on top of one of its poles."""


class DegeneratePoleError(GiantAtomError, ArithmeticError):
    """Residue formula is singular (1 - dSigma/dz vanishes)."""


class NotABoundStateError(GiantAtomError, ValueError):
    """Requested eigenvector lies inside the continuum."""


class NumericFailure(GiantAtomError, RuntimeError):
    """Non-finite numbers appeared during a computation."""


class ConfigError(GiantAtomError, ValueError):
    """Malformed run configuration."""


class ModelValidityWarning(UserWarning):
    """Parameters outside the regime where the model is derived (g > J)."""


class ToleranceWarning(UserWarning):
    """A numerical tolerance could not be met; the result is still returned."""


class WrapAroundWarning(UserWarning):
    """Emitted radiation may wrap around the periodic lattice within the run."""
