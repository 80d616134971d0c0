"""
Error hierarchy for wavecoex.

Every error raised on purpose by the package derives from WavecoexError so the
CLI can map it onto an exit code.
"""

from typing import Any, Optional


class WavecoexError(Exception):
    """Base class for all wavecoex errors."""


class ParameterRangeError(WavecoexError, ValueError):
    """A numeric parameter is outside its admissible range."""


class ConfigurationError(WavecoexError, ValueError):
    """Inconsistent configuration, e.g. waveform kind and params that do not match."""


class GeometryError(WavecoexError, ValueError):
    """Subcarrier assignments or victim bands that overlap."""


class ContractViolationError(WavecoexError, ValueError):
    """A caller broke a documented precondition."""


class QuadratureError(WavecoexError, ArithmeticError):
    """Adaptive quadrature did not converge within its depth limit."""

    def __init__(self, message: str, partial_estimate: float, unresolved_intervals: int = 0):
        super().__init__(message)
        self.partial_estimate = partial_estimate
        self.unresolved_intervals = unresolved_intervals


class SolverError(WavecoexError, ArithmeticError):
    """Power allocation bisection did not converge; carries the best iterate."""

    def __init__(self, message: str, best_result: Optional[Any] = None):
        super().__init__(message)
        self.best_result = best_result


class ConfigSyntaxError(ConfigurationError):
    """The configuration document could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class ConfigValidationError(ConfigurationError):
    """A configuration field violates its constraint."""

    def __init__(self, field: str, constraint: str):
        super().__init__(f"Invalid value for '{field}': {constraint}")
        self.field = field
        self.constraint = constraint


class UnitError(ConfigValidationError):
    """A user-unit value cannot be converted to a valid internal value."""
