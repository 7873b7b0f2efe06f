"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class LindbladiumError(Exception):
    """Base class for all package errors."""


class DimensionError(LindbladiumError, ValueError):
    """Operands live on different numbers of sites, or an index is out of range."""


class CapacityError(LindbladiumError):
    """Requested size exceeds a configured dense or matrix-free limit."""


class SpecificationError(LindbladiumError, ValueError):
    """A chain or driving description violates its invariants."""


class ReductionError(LindbladiumError):
    """Boundary operators are not of a recognised ladder form."""


class ConfigError(LindbladiumError):
    """A run configuration could not be parsed or validated.

    ``key`` is the dotted path of the offending entry and ``line`` its
    1-based line in the source text, when known.
    """

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key:
            where.append(f"key '{key}'")
        if line:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.key = key
        self.line = line


class ConvergenceError(LindbladiumError):
    """The steady-state solver stopped before reaching its tolerance.

    Attributes
    ----------
    best_residual : float
        Smallest residual seen before giving up.
    partial : object
        Best available partial result (may be ``None``).
    """

    def __init__(self, message: str, best_residual: float, partial=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.partial = partial
