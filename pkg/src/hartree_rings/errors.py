"""Exception hierarchy shared by all hartree_rings modules."""


class HartreeRingsError(Exception):
    """Base class for all errors raised by this package."""


class ConvergenceError(HartreeRingsError):
    """An iterative solver failed to converge; carries the last residual."""

    def __init__(self, message, last_residual=None):
        super().__init__(message)
        self.last_residual = last_residual


class AccuracyError(HartreeRingsError):
    """A computed quantity failed its accuracy contract (grid too coarse,
    tail mass not converged, identity residual too large)."""


class DegenerateInputError(HartreeRingsError):
    """Input is degenerate for the requested operation (e.g. a zero or
    negative initial guess for a positive ground state)."""


class GridRangeError(HartreeRingsError):
    """A requested evaluation window or resampling falls outside the grid."""


class DomainError(HartreeRingsError):
    """Arguments outside the mathematical domain of an operation."""


class SingularityError(HartreeRingsError):
    """A linear system that must be solved is singular."""


class OutsideRegimeError(HartreeRingsError):
    """Parameters fall outside the regime where the construction exists
    (e.g. negative squares for the synchronization coefficients)."""


class ParityError(HartreeRingsError):
    """Alternating sign patterns require an even number of peaks."""


class GeometryError(HartreeRingsError):
    """Peak configuration does not fit in the requested box."""


class ContractViolationError(HartreeRingsError):
    """An input violates a documented precondition (e.g. a field that does
    not decay at the box boundary)."""


class ChecksumError(HartreeRingsError):
    """A cache file failed its checksum or metadata verification."""


class ValidationError(HartreeRingsError):
    """A parameter set violates the model assumptions."""

    def __init__(self, message, reasons=()):
        super().__init__(message)
        self.reasons = tuple(reasons)
