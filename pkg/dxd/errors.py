# errors.py
from typing import Optional


class DxdError(Exception):
    """Base class of every error raised by the library."""


class ConfigError(DxdError):
    pass


class ParseError(DxdError):
    """
    Syntax error in one of the text formats.
    Carries the column (0-based position), the line and the source name when known.
    """

    def __init__(self, message: str, position: Optional[int] = None,
                 line: Optional[int] = None, source: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.position = position
        self.line = line
        self.source = source

    def __str__(self) -> str:
        where = []
        if self.source:
            where.append(self.source)
        if self.line is not None:
            where.append(str(self.line))
        text = self.message
        if self.position is not None:
            text = f"{text} (at column {self.position})"
        return f"{':'.join(where)}: {text}" if where else text


class KernelError(ParseError):
    """Kernel invariant violated: duplicate-function, non-leaf-function or function-root."""

    def __init__(self, message: str, reason: str, **kwargs):
        super().__init__(message, **kwargs)
        self.reason = reason


class GrammarError(ParseError):
    pass


class EmptyLanguageError(DxdError):
    pass


class NotRepresentableError(DxdError):
    pass


class ResourceCapExceeded(DxdError):
    def __init__(self, cap: str, limit: int, detail: str = ""):
        message = f"resource cap '{cap}' exceeded (limit {limit})"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.cap = cap
        self.limit = limit


class InconsistentTypingError(DxdError):
    pass


class IncompatibleDesignError(DxdError):
    pass


class ArityError(DxdError):
    pass
