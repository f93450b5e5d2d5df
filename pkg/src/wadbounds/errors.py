"""Exception hierarchy shared across the package."""


class WadboundsError(Exception):
    """Base class for all package-specific errors."""


class RowIntervalViolation(WadboundsError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"row {row}: y_lower > y_upper")


class DimensionMismatch(WadboundsError):
    def __init__(self, row=None, message=None):
        self.row = row
        super().__init__(message or f"row {row}: covariate length differs from first row")


class TooFewRows(WadboundsError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"need at least 2 rows, got {n}")


class UnsupportedDimension(WadboundsError):
    def __init__(self, ell):
        self.ell = ell
        super().__init__(f"no built-in direction grid for ell={ell} > 3; supply one explicitly")


class MomentSystemSingular(WadboundsError):
    pass


class IndexOutOfRange(WadboundsError):
    pass


class NonUnitDirection(WadboundsError):
    pass


class EmptyConstraintSet(WadboundsError):
    def __init__(self, v, side):
        self.v = v
        self.side = side
        super().__init__(f"no support pairs on the {side} side of v={v}")


class SingularRenormalization(WadboundsError):
    pass


class GridMismatch(WadboundsError):
    pass


class ParseError(WadboundsError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class BandwidthRateWarning(UserWarning):
    """Finite-sample heuristic flag for asymptotic bandwidth rate conditions."""
