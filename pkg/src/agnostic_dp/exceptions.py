"""
Custom exceptions for the agnostic-dp toolkit.
"""

from typing import Optional


class ToolkitError(Exception):
    """
    Base exception for toolkit errors.

    Raised for argument validation failures, unrealizable inputs and
    broken internal invariants. Every subclass carries the exit code the
    command-line interface reports for it.
    """

    exit_code: int = 1

    def __init__(self, message: str, original_error: Optional[Exception] = None):
        """
        Initialize the exception.

        Args:
            message: Human-readable error message
            original_error: The original exception that caused this error (optional)
        """
        super().__init__(message)
        self.message = message
        self.original_error = original_error

    def __str__(self) -> str:
        if self.original_error:
            return f"{self.message} (Original error: {self.original_error})"
        return self.message


class InvalidArgumentError(ToolkitError):
    """
    Exception raised when an operation's precondition is violated.

    This includes out-of-range indices, empty datasets where a nonempty
    one is required, parameters outside their valid ranges, etc.
    """

    exit_code = 2


class NotRealizableError(ToolkitError):
    """
    Exception raised when a dataset that must be realizable is not.

    The realizable predictor raises it when some chunk of its input has no
    consistent concept in the class.
    """

    exit_code = 3


class ConfigError(ToolkitError):
    """
    Exception raised for configuration-related errors.

    This includes malformed settings files and invalid experiment configs.
    """

    exit_code = 2


class AuditError(ToolkitError):
    """
    Exception raised for malformed privacy audit plans.

    This includes non-neighboring dataset pairs, too few trials and
    candidate sets that cannot be aligned.
    """

    exit_code = 2
