"""
Exception hierarchy for the regen-stable laboratory.
"""
from typing import List, Optional


class RegenStableError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(RegenStableError, ValueError):
    """A precondition of an operation was violated."""


class SingularInputError(InvalidInputError):
    """A kernel was evaluated on the diagonal, where it is left undefined."""


class ConfigError(RegenStableError):
    """Configuration could not be read or failed validation.

    Attributes:
        fields: one "location: message" entry per invalid field
    """

    def __init__(self, message: str, fields: Optional[List[str]] = None):
        self.fields = list(fields or [])
        if self.fields:
            message = message + "\n  " + "\n  ".join(self.fields)
        super().__init__(message)


class ExperimentFailure(RegenStableError):
    """An experiment ran but at least one acceptance check failed."""

    def __init__(self, failing: List[str]):
        self.failing = list(failing)
        super().__init__("failed checks: " + ", ".join(self.failing))


class OutputError(RegenStableError, OSError):
    """Experiment outputs could not be written."""
