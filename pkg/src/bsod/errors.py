"""Exception types raised across the package."""


class BsodError(Exception):
    """Base class for all errors raised by this package."""


class NonFiniteInput(BsodError, ValueError):
    pass


class InvalidEpsilon(BsodError, ValueError):
    pass


class DimensionMismatch(BsodError, ValueError):
    pass


class NoEdges(BsodError, ValueError):
    """The graph has no edges, so its Laplacian is the zero matrix."""


class InvalidTolerance(BsodError, ValueError):
    pass


class DegenerateValues(BsodError, ValueError):
    """All values are (numerically) identical; no two-cluster split exists."""


class TooFewPoints(BsodError, ValueError):
    pass


class InvalidContamination(BsodError, ValueError):
    pass


class ParseError(BsodError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingColumn(ParseError):
    pass


class NoTrueOutliers(BsodError, ValueError):
    """Recall is undefined when the labels contain no outlier."""


class EmptyReport(BsodError, ValueError):
    pass


class RowCountMismatch(BsodError, ValueError):
    pass
