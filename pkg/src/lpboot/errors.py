"""Exception hierarchy shared across the package."""


class LpBootError(Exception):
    """Base class for all package errors."""


class SingularDesign(LpBootError):
    """A least-squares design has (numerically) collinear or all-zero columns."""


class DomainError(LpBootError, ValueError):
    """An argument lies outside the domain of a function."""


class EmptyInput(LpBootError, ValueError):
    pass


class HorizonTooLarge(LpBootError, ValueError):
    pass


class DegenerateVariance(LpBootError):
    """A standard error is zero, so a studentized root is undefined."""


class TooManyDegenerateDraws(LpBootError):
    pass


class MismatchedDraws(LpBootError, ValueError):
    """Bootstrap draws were produced with a scheme or SE kind the method does not use."""


class ReplicationFailed(LpBootError):
    pass


class ConfigError(LpBootError, ValueError):
    """Invalid configuration. ``field`` is the dotted path of the offending entry."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if field:
            where.append(field)
        if line is not None:
            where.append(f"line {line}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class DataError(LpBootError, ValueError):
    """Problems with an ingested data file."""


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class MissingColumn(DataError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column!r} not found in header")


class NonNumeric(DataError):
    def __init__(self, row: int, value: str = ""):
        self.row = row
        self.value = value
        super().__init__(f"non-numeric value {value!r} at data row {row}")


class IoError(LpBootError, OSError):
    """Output could not be produced or written."""
