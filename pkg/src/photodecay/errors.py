"""Exception hierarchy shared by every module."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class RangeError(ArithmeticError):
    """A result cannot be represented (overflow, underflow of a denominator)."""


class DegenerateDataError(ValueError):
    """The data carry no information about the decay time (e.g. all times zero)."""


class FormatError(ValueError):
    """An input file does not follow the expected layout."""


class ParseError(FormatError):
    """A record in an input file could not be parsed.

    Attributes
    ----------
    lineno : int
        1-based line number of the offending record.
    """

    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class EmptyInputError(FormatError):
    """An input file holds no data records."""
