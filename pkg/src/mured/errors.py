"""Exception hierarchy.

``InputError`` covers everything caused by bad data or bad arguments (the CLI
maps it to exit code 2).  ``PathMismatch`` means two computation routes that
must agree did not, which is a bug rather than a data problem (exit code 3).
"""


class MuredError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MuredError, ValueError):
    """Invalid input data or arguments."""


class AllZeroCounts(InputError):
    pass


class TupleOutOfAlphabet(InputError):
    pass


class InvalidAlphabet(InputError):
    pass


class UnknownVariable(InputError, KeyError):
    def __str__(self):
        # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class DuplicateVariable(InputError):
    pass


class EmptyVariableSet(InputError):
    pass


class OverlappingSets(InputError):
    pass


class IdenticalVariables(InputError):
    pass


class ZeroProbabilityCondition(InputError):
    pass


class InvalidBase(InputError):
    pass


class InvalidOrder(InputError):
    pass


class DegenerateAlphabet(InputError):
    pass


class UnknownMeasure(InputError):
    pass


class ArityTooSmall(InputError):
    pass


class InvalidProbability(InputError):
    pass


class InvalidSpec(InputError):
    pass


class AllCellsZero(InputError):
    pass


class TooLargeForOracle(InputError):
    pass


class EmptyDataset(InputError):
    pass


class EmptyFile(InputError):
    pass


class RaggedRow(InputError):
    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class IoFailure(InputError):
    pass


class NoTimeColumn(InputError):
    pass


class InvalidTimeValue(InputError):
    pass


class InvalidWeight(InputError):
    pass


class PathMismatch(MuredError, ArithmeticError):
    """Two independent computation routes for one quantity disagree."""
