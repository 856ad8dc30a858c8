"""Exception hierarchy shared by every module."""


class RankFreqError(ValueError):
    """Base class for all toolkit errors."""


class SchemaError(RankFreqError):
    pass


class ParseError(RankFreqError):
    """Malformed input rows. ``lines`` lists the offending 1-based line numbers."""

    def __init__(self, message, lines=()):
        super().__init__(message)
        self.lines = tuple(lines)


class EmptyInputError(RankFreqError):
    pass


class EmptyResultError(RankFreqError):
    pass


class InsufficientDataError(RankFreqError):
    pass


class DomainError(RankFreqError):
    pass


class DecodeError(RankFreqError):
    pass


class UndefinedCorrelationError(RankFreqError):
    pass
