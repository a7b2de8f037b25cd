"""Exception types shared across the package."""


class SeededPdcError(Exception):
    """Base class for all package errors."""


class UndefinedPointError(SeededPdcError, ValueError):
    """Raised at the all-vacuum origin, where every gamma parameter is 0/0."""


class NumericalFailure(SeededPdcError, ArithmeticError):
    """A numerical routine failed to meet its accuracy contract."""


class TruncationError(NumericalFailure):
    """The requested accuracy cannot be met at the given Fock truncation.

    ``trace_defect`` carries the measured missing probability mass when known.
    """

    def __init__(self, message, trace_defect=None):
        super().__init__(message)
        self.trace_defect = trace_defect


class InsufficientData(SeededPdcError, ValueError):
    """Too few detection events to form an estimate."""


class NotApplicable(SeededPdcError):
    """The requested quantity has no valid definition for these inputs."""
