"""Adaptive stochastic search dimensionality reduction for binary classification."""

from .errors import (
    MassError,
    ParameterError,
    ShapeError,
    NumericalError,
    GenerationError,
    SelectionError,
    DegenerateBasisError,
    DegenerateSlopesError,
    DomainError,
)
from .numerics import RngStream
from .projection import ProjectionMatrix, SparsitySpec
from .mass import MassConfig, MassResult, run_mass

__all__ = [
    "MassError",
    "ParameterError",
    "ShapeError",
    "NumericalError",
    "GenerationError",
    "SelectionError",
    "DegenerateBasisError",
    "DegenerateSlopesError",
    "DomainError",
    "RngStream",
    "ProjectionMatrix",
    "SparsitySpec",
    "MassConfig",
    "MassResult",
    "run_mass",
]

__version__ = "0.1.0"
