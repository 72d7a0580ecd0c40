"""
Custom exceptions for nanochiral.
"""


class NanochiralError(Exception):
    """Base exception for all nanochiral errors."""

    pass


class DomainError(NanochiralError, ValueError):
    """Raised when an argument lies outside a documented domain."""

    pass


class ConfigError(NanochiralError):
    """Raised when a run configuration key or value is invalid."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class ModeSolverError(NanochiralError):
    """Raised when the guided-mode solver cannot produce a root."""

    pass


class CircularPointNotFoundError(ModeSolverError):
    """Raised when no interior point of circular polarization exists."""

    pass


class SeriesConvergenceError(NanochiralError):
    """Raised when the cylinder series cannot meet its convergence bound."""

    def __init__(self, message: str, n_max: int | None = None):
        super().__init__(message)
        self.n_max = n_max


class DegenerateFieldError(NanochiralError):
    """Raised when a field or a flux sum vanishes where it must not."""

    pass


class DatasetFormatError(NanochiralError):
    """Raised when a flux dataset file is malformed."""

    def __init__(
        self, message: str, row: int | None = None, column: str | None = None
    ):
        super().__init__(message)
        self.row = row
        self.column = column


class FitConvergenceError(NanochiralError):
    """Raised when the offset search ends on a bound."""

    def __init__(self, message: str, phi0_offset: float | None = None):
        super().__init__(message)
        self.phi0_offset = phi0_offset


class UnknownPolarizationError(NanochiralError):
    """Raised when a polarization name is not recognised."""

    pass
