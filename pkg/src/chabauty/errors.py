"""Error hierarchy — every failure carries the CLI exit code it maps to."""

from __future__ import annotations


class ChabautyError(Exception):
    """Base class for all package errors."""

    exit_code = 4


class DescriptorError(ChabautyError, ValueError):
    """Malformed JSON descriptor or number literal."""

    exit_code = 3


class InexactInputError(DescriptorError):
    """Floating-point data where exact rationals or surds are required."""


class DegenerateBasisError(ChabautyError, ValueError):
    """Zero or collinear vectors, or a singular matrix."""

    exit_code = 3


class StratumError(ChabautyError, ValueError):
    """Operation undefined on the stratum it was given."""

    exit_code = 3


class NumericError(ChabautyError, RuntimeError):
    """A numerical procedure failed; ``residual`` holds the last measured error."""

    def __init__(self, message: str, residual: float | None = None) -> None:
        super().__init__(message)
        self.residual = residual


class BracketError(NumericError):
    """The halo predicate is false at the top of the epsilon bracket."""


class ConvergenceError(NumericError):
    """Newton iteration did not reach the requested residual."""


class EnumerationOverflow(NumericError):
    """A point enumeration would exceed the configured cap."""

    def __init__(self, count: int, cap: int) -> None:
        super().__init__(f"enumeration of ~{count} points exceeds cap {cap}")
        self.count = count
        self.cap = cap


class DomainError(ChabautyError, ValueError):
    """Argument outside the operation's domain (non-positive radius, scale, index)."""

    exit_code = 3
