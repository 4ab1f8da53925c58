"""Exception taxonomy shared across the package.

The CLI maps these onto its exit-code contract: validation/domain problems
exit 1, I/O problems exit 2, checkpoint integrity problems exit 3.
"""


class PrimeCensusError(Exception):
    """Base class for all errors raised by this package."""


class RangeTooLargeError(PrimeCensusError):
    """An input would push x**2 (or a count) past the 64-bit guard."""


class DomainError(PrimeCensusError):
    """An operation was invoked outside its mathematical domain."""


class SingularDesignError(PrimeCensusError):
    """A regression design matrix is degenerate (e.g. all x equal)."""


class CensusFormatError(PrimeCensusError):
    """A census file failed validation. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class CensusHeaderError(CensusFormatError):
    """Header line does not match the census format."""


class CensusRowError(CensusFormatError):
    """A row is malformed (wrong field count, non-integer, negative count)."""


class CensusSquareError(CensusFormatError):
    """A row's x_squared field does not equal x*x."""


class CensusOrderError(CensusFormatError):
    """Row x values are not strictly ascending."""


class CensusGapError(CensusFormatError):
    """Row x values skip one or more integers."""


class CheckpointError(PrimeCensusError):
    """A checkpoint file is unusable (missing fields, bad version line)."""


class CheckpointIntegrityError(CheckpointError):
    """Checkpoint digest does not match the emitted census rows."""
