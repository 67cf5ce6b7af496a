"""Exception types raised across the toolkit."""


class MrcError(Exception):
    """Base class for all toolkit errors."""


class NumericalBreakdown(MrcError):
    """The simplex iterations lost numerical stability."""


class DegenerateData(MrcError):
    """No threshold candidate exists (every dimension is constant)."""


class TooManyLabels(MrcError):
    """Subset linearization would need 2**|Y| - 1 rows per matrix."""


class UncertaintySetEmpty(MrcError):
    """The moment box [a, b] admits no distribution."""


class BoundChainViolation(MrcError):
    """A computed bound fell outside 0 <= LB <= UB <= 1."""


class TooFewSamples(MrcError):
    pass


class DataError(MrcError):
    pass


class ParseError(DataError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}, column {column!r}: cannot parse {value!r} as a number")


class MissingValue(DataError):
    def __init__(self, row: int, column: str):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column!r}: missing value")


class SchemaMismatch(DataError):
    pass
