"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 invalid arguments, 3 data errors, 4 numerical failures.
"""


class FastSDAError(Exception):
    exit_code = 1


class DataError(FastSDAError):
    exit_code = 3


class NumericalError(FastSDAError):
    exit_code = 4


class ShapeMismatch(DataError, ValueError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class NotSymmetric(NumericalError, ValueError):
    pass


class NotConverged(NumericalError):
    pass


class EmptyResult(NumericalError):
    pass


class RankDeficient(NumericalError):
    pass


class RankDeficientProjection(NumericalError):
    pass


class OracleTooLarge(DataError):
    pass


class DegenerateInput(DataError):
    pass


class DegenerateData(DataError):
    pass


class LayoutInvalid(DataError):
    pass


class ClassTooSmall(DataError):
    def __init__(self, label, needed, have=None):
        self.label = label
        self.needed = needed
        self.have = have
        msg = f"class {label!r} has {have} samples, needs at least {needed}"
        super().__init__(msg)


class NonpositiveSigma(DataError, ValueError):
    pass


class TooFewSamples(DataError):
    pass


class RTooLarge(DataError):
    pass


class KTooLarge(DataError):
    pass


class ParseError(DataError):
    def __init__(self, line, column, message="could not parse value"):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class RaggedRows(ParseError):
    def __init__(self, line, expected, got):
        super().__init__(line, got, f"expected {expected} fields, found {got}")


class EmptyFile(DataError):
    pass


class ViewShapeMismatch(DataError):
    pass


class MissingLabels(DataError):
    pass


class VersionMismatch(DataError):
    pass


class CorruptBlock(DataError):
    pass


class DatasetUnavailable(DataError):
    pass
