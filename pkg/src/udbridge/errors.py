"""Shared exception types.

Every error raised on bad input data derives from DataError so callers
(CLI, HTTP service) can map them to a single exit code / status class.
"""


class UdbridgeError(Exception):
    """Base class for all errors raised by this package."""


class DataError(UdbridgeError):
    """Invalid input data (malformed file, inconsistent document, bad request)."""


class ConlluParseError(DataError):
    """A CoNLL-U file could not be parsed. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(DataError):
    """A document violates a structural constraint (ids, heads, ranges)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UsageError(UdbridgeError):
    """Bad invocation: unknown flags, missing arguments, bad combinations."""
