"""
Error hierarchy shared by every module of the laboratory.
"""

from typing import Any, Optional


class LabError(Exception):
    """Base class for all laboratory errors."""


class InvalidInputError(LabError, ValueError):
    """Raised when an operation receives malformed or out-of-domain input."""


class SchemaViolationError(InvalidInputError):
    """Raised when a config document violates the schema."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConfigParseError(InvalidInputError):
    """Raised when a config document is not valid JSON."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class CapExceededError(LabError, RuntimeError):
    """Raised when a conjugate maximizer stays on the radius cap after escalation."""

    def __init__(self, message: str, radius_cap: float):
        self.radius_cap = radius_cap
        super().__init__(message)


class StepRejectedError(LabError, RuntimeError):
    """Raised when a time step violates the CFL guard."""

    def __init__(self, t: float, dt: float, courant: float, limit: float):
        self.t = t
        self.dt = dt
        self.courant = courant
        self.limit = limit
        super().__init__(
            f"step rejected at t={t:.6g}: courant number {courant:.4g} exceeds "
            f"{limit:.4g}, reduce dt (currently {dt:.3g})"
        )


class FatalDiagnosticError(LabError, RuntimeError):
    """Raised when the discrete system loses a structural property (e.g. SPD mass matrix)."""


class AbortedRunError(LabError, RuntimeError):
    """Raised when a run produces a non-finite state."""

    def __init__(self, message: str, t: float, last_state: Optional[Any] = None):
        self.t = t
        self.last_state = last_state
        super().__init__(message)
