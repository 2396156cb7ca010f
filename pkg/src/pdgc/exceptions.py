"""Exception hierarchy shared across the package.

Plain ``ValueError`` is raised for bad arguments (wrong indices, out-of-range
options); the classes below mark problems with the data or the numerics.
"""


class PdgcError(Exception):
    """Base class for all package-specific errors."""


class ParseError(PdgcError):
    """A file could not be parsed (malformed CSV, ragged rows, ...)."""


class ValidationError(PdgcError):
    """Input data violates a structural requirement (non-finite, too small)."""


class EstimationError(PdgcError):
    """Model estimation failed (ill-conditioned regression, unstable fit)."""


class NumericalError(PdgcError):
    """A numerical routine failed to converge or produced an invalid result."""
