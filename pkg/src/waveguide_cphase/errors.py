"""Exception hierarchy shared across the package.

Error categories map onto the CLI's exit codes: configuration/geometry
problems, convergence failures of quadrature or optimization, and
numerical-domain violations.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """A run configuration or artifact file failed validation."""


class GeometryError(ValueError):
    """An emitter-array geometry request violates a construction invariant."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """A quadrature rule or optimizer failed to reach its tolerance.

    Attributes
    ----------
    achieved : float | None
        The tolerance actually reached before giving up, when known.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class OptimizationError(RuntimeError):
    """A placement search found no usable interior minimum.

    Attributes
    ----------
    scan : tuple[tuple[float, float], ...]
        The coarse-scan trace as ``(position, objective)`` pairs, kept so a
        failure can be diagnosed without re-running the search.
    """

    def __init__(self, message: str,
                 scan: tuple[tuple[float, float], ...] = ()):
        super().__init__(message)
        self.scan = tuple(scan)


class DegeneracyError(RuntimeError):
    """Two eigenvalues are too close for the spectral formulas to be reliable.

    Attributes
    ----------
    gap : float
        The offending eigenvalue gap.
    """

    def __init__(self, message: str, gap: float):
        super().__init__(message)
        self.gap = gap
