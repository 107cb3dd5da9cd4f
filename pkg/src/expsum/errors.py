"""Exception hierarchy shared by every module and mapped to CLI exit codes."""

from __future__ import annotations

from typing import Any


class ExpsumError(ValueError):
    """Base class for all library errors."""


class InvalidParameterError(ExpsumError):
    pass


class InvalidSequenceError(ExpsumError):
    pass


class TooShortError(ExpsumError):
    pass


class DegenerateError(ExpsumError):
    """A gap is too close to an integer: sin(pi * gap) is below threshold."""


class NonMonotoneGapsError(ExpsumError):
    pass


class InvalidFractionError(ExpsumError):
    pass


class InvalidIntervalError(ExpsumError):
    pass


class NotAdmissibleError(ExpsumError):
    def __init__(self, message: str, report: Any):
        super().__init__(message)
        self.report = report


class NoCounterexampleError(ExpsumError):
    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics
