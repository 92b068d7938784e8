"""Exception types shared across the package.

ValueError subclasses signal bad inputs (CLI exit code 2); RuntimeError
subclasses signal computational failures (CLI exit code 1).
"""


class SizeError(ValueError):
    """System size outside the supported range."""


class ShapeError(ValueError):
    """Vector or matrix dimensions inconsistent with the sector."""


class ValidationError(ValueError):
    """Input fails a documented precondition (normalization, matching metadata, ...)."""


class GridError(ValueError):
    """Field grid is non-uniform, unordered, or otherwise unusable."""


class UnsupportedBlockError(ValueError):
    """Requested subsystem block is not a contiguous site run."""


class FitError(ValueError):
    """Scaling fit is underdetermined or degenerate."""


class ConfigurationError(ValueError):
    """Sweep or CLI configuration is invalid."""


class ConvergenceError(RuntimeError):
    """Eigensolver failed to reach the requested residual."""

    def __init__(self, message, best_residual=None, iterations=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.iterations = iterations


class CoverageError(RuntimeError):
    """Sweep records do not cover the requested grid."""

    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = tuple(missing)
