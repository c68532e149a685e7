"""Exception hierarchy shared across the package."""

from __future__ import annotations


class MassError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(MassError, ValueError):
    """An argument value violates a documented precondition."""


class ShapeError(MassError, ValueError):
    """Array dimensions are incompatible with the requested operation."""


class NumericalError(MassError, ArithmeticError):
    """A numerical routine failed to produce a usable result."""


class GenerationError(MassError, RuntimeError):
    """Random generation exhausted its resampling budget."""


class SelectionError(MassError, RuntimeError):
    """Variable selection cannot proceed on the given inputs."""


class DegenerateBasisError(MassError, RuntimeError):
    """The curvature operator does not have the expected null space."""


class DegenerateSlopesError(MassError, RuntimeError):
    """All slope coefficients of a candidate column are zero; resample."""


class DomainError(MassError, ValueError):
    """Input values fall too far outside the fitted domain."""
