"""Exception hierarchy for the featstab package.

Every error raised on purpose derives from :class:`StabilityError`, so the
CLI and the HTTP service can map failures to a stable, machine-parseable
error class name.
"""


class StabilityError(Exception):
    """Base class for all featstab errors."""


class NonSquare(StabilityError):
    """A matrix that must be square is not."""


class ValueOutOfRange(StabilityError):
    """A similarity entry lies outside [0, 1] (NaN included)."""


class AsymmetryExceedsTolerance(StabilityError):
    """A similarity matrix is asymmetric beyond the accepted tolerance."""


class BadDiagonal(StabilityError):
    """A similarity matrix diagonal entry differs from 1."""


class WrongPairCount(StabilityError):
    """A pair-score list does not contain exactly m(m-1)/2 entries."""


class InvalidEnsemble(StabilityError):
    """A selection ensemble violates a structural invariant (e.g. m < 2)."""


class LengthMismatch(StabilityError):
    """Two vectors that must have equal length do not."""


class TooFewObservations(StabilityError):
    """Fewer than two observations; correlations are undefined."""


class UniverseMismatch(StabilityError):
    """Feature sets, matrices, or ensembles refer to different universes."""


class GraphTooLargeForOracle(StabilityError):
    """The brute-force matching oracle only accepts small graphs."""


class EnumerationTooLarge(StabilityError):
    """Exact expectation enumeration would exceed the configured cap."""


class BadCardinality(StabilityError):
    """A requested set cardinality is negative or exceeds the universe size."""


class MissingSimilarityMatrix(StabilityError):
    """An adjusted measure was requested without similarity information."""


class UniverseTooLarge(StabilityError):
    """The exhaustive study is limited to small universes."""


class InsufficientEnsembles(StabilityError):
    """Measure correlation needs at least three ensembles per data set."""


class UnknownMeasure(StabilityError):
    """A measure name is not one of the seven supported measures."""


class ConflictingInputs(StabilityError):
    """Mutually exclusive inputs (similarity file and data file) were given."""


class ParseError(StabilityError):
    """A file could not be parsed; carries the file path and line number."""

    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
        self.message = message
