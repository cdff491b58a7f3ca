# src/utils/exceptions.py
"""Exception hierarchy shared by every service and mapped to exit codes in main."""
from typing import Any, Optional


class ChebFiniteError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 4


class InputError(ChebFiniteError, ValueError):
    """Malformed problem, coefficient file or parameter."""

    exit_code = 2


class DomainError(InputError):
    """A leading coefficient or denominator vanishes on [-1, 1]."""


class UnsupportedConditionError(InputError):
    """Conditions that are not initial values at 0 were given to the validator."""


class SingularSystemError(ChebFiniteError):
    """The selection linear system of the solver is singular for the current N."""

    def __init__(self, message: str, start_index: Optional[int] = None):
        super().__init__(message)
        self.start_index = start_index


class RefinementError(ChebFiniteError):
    """Root certification or rational expansion could not reach the requested accuracy."""


class ContractionError(ChebFiniteError):
    """A^i / i! >= 1, so the Volterra iteration is not a contraction."""


class ValidationInconclusiveError(ChebFiniteError):
    """The validator could not certify an enclosure; carries the partial report."""

    exit_code = 3

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class InternalInvariantError(ChebFiniteError, RuntimeError):
    """An algebraic invariant failed; indicates a bug rather than bad input."""

    exit_code = 4
