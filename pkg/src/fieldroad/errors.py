"""Exception taxonomy shared by the whole package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericalError (and
subclasses) -> 3, PropertyError -> 4.
"""


class FieldRoadError(Exception):
    """Base class for all package errors."""


class ConfigError(FieldRoadError, ValueError):
    """Invalid configuration value, unknown key, or violated type invariant."""


class DomainError(FieldRoadError, ValueError):
    """An operation was called outside its mathematical domain of validity."""


class NumericalError(FieldRoadError, RuntimeError):
    """A numerical procedure failed (solver breakdown, regime violation)."""


class ConvergenceError(NumericalError):
    """An iteration did not converge within its budget."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DiagnosticsError(FieldRoadError, RuntimeError):
    """Post-processing cannot be carried out on the given trajectory."""


class PropertyError(FieldRoadError, RuntimeError):
    """A verified structural property failed."""
