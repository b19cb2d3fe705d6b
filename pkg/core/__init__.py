"""
Core model layer: N-functions, Orlicz diagnostics, constitutive laws, errors and settings.
"""

from .config import Config
from .errors import (
    AbortedRunError,
    CapExceededError,
    ConfigParseError,
    FatalDiagnosticError,
    InvalidInputError,
    LabError,
    SchemaViolationError,
    StepRejectedError,
)

__all__ = [
    "Config",
    "LabError",
    "InvalidInputError",
    "SchemaViolationError",
    "ConfigParseError",
    "CapExceededError",
    "StepRejectedError",
    "FatalDiagnosticError",
    "AbortedRunError",
]
