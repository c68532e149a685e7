"""Sparse random projection columns used by the stochastic search.

Candidate directions are elementwise products ``a = u * v`` of standard
normals ``u`` and Bernoulli masks ``v``, one mask probability per column.
Column sparsity levels are themselves random, drawn from a Beta distribution
whose mean is the current target sparsity, which is what lets the search
adapt how sparse its proposals are.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, ParameterError, ShapeError
from .numerics import RngStream

_XI_CLAMP_LO = 0.01
_XI_CLAMP_HI = 0.99
_RESAMPLE_CAP = 100


@dataclass(frozen=True)
class SparsitySpec:
    """Target mean sparsity together with the Beta concentration parameter.

    A column sparsity ``xi_j`` is drawn from ``Beta(alpha, alpha (1 - t) / t)``
    where ``t`` is the (clamped) target, so ``E[xi_j] = t``.  ``target == 0``
    is the exactly-dense special case: no Beta draw is made and every mask
    entry is kept.
    """

    target: float
    alpha: float = 5.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.target < 1.0:
            raise ParameterError(f"target sparsity must lie in [0, 1), got {self.target}")
        if self.alpha <= 0.0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")

    def beta_params(self) -> tuple[float, float]:
        """(a, b) of the Beta law after clamping the target to [0.01, 0.99]."""
        t = min(max(self.target, _XI_CLAMP_LO), _XI_CLAMP_HI)
        return self.alpha, self.alpha * (1.0 - t) / t


def draw_column_sparsities(count: int, spec: SparsitySpec, rng: RngStream) -> np.ndarray:
    """Draw ``count`` per-column sparsity levels from the spec's Beta law."""
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    if spec.target == 0.0:
        return np.zeros(count)
    a, b = spec.beta_params()
    return rng.generator().beta(a, b, size=count)


@dataclass(frozen=True)
class ProjectionMatrix:
    """A d x p projection with unit-norm, not-all-zero columns."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"entries must be a non-empty 2-d array, got {arr.shape}")
        norms = np.sqrt(np.einsum("ij,ij->j", arr, arr))
        if np.any(norms == 0.0):
            raise ParameterError("projection columns must not be all zero")
        if np.max(np.abs(norms - 1.0)) > 1e-8:
            raise ParameterError("projection columns must have unit norm")
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def column_sparsity(self) -> np.ndarray:
        """Fraction of exact zeros in each column."""
        return np.mean(self.entries == 0.0, axis=0)

    @property
    def mean_sparsity(self) -> float:
        return float(np.mean(self.entries == 0.0))


def gen_candidate_columns(
    d: int, count: int, spec: SparsitySpec, rng: RngStream
) -> np.ndarray:
    """Generate a d x count block of sparse random unit-norm columns.

    Each column draws its own sparsity level, then ``a = u * v`` with
    ``u ~ N(0, 1)`` and ``v ~ Bernoulli(1 - xi_j)``, rescaled to unit norm.
    Columns whose mask zeroed every entry are resampled with a fresh
    sparsity level; ``GenerationError`` after 100 rounds.
    """
    if d < 1:
        raise ParameterError(f"d must be >= 1, got {d}")
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    gen = rng.generator()
    out = np.empty((d, count))
    pending = np.arange(count)
    for _ in range(_RESAMPLE_CAP):
        k = pending.size
        if spec.target == 0.0:
            xis = np.zeros(k)
        else:
            a, b = spec.beta_params()
            xis = gen.beta(a, b, size=k)
        u = gen.standard_normal((d, k))
        v = gen.random((d, k)) < (1.0 - xis)
        block = u * v
        norms = np.sqrt(np.einsum("ij,ij->j", block, block))
        ok = norms > 0.0
        out[:, pending[ok]] = block[:, ok] / norms[ok]
        pending = pending[~ok]
        if pending.size == 0:
            return out
    raise GenerationError(
        f"failed to draw a non-zero column after {_RESAMPLE_CAP} rounds "
        f"(target sparsity {spec.target})"
    )


def project(x: np.ndarray, a: ProjectionMatrix | np.ndarray) -> np.ndarray:
    """Apply the projection: ``z = x @ a``."""
    entries = a.entries if isinstance(a, ProjectionMatrix) else np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or entries.ndim != 2 or x.shape[1] != entries.shape[0]:
        raise ShapeError(
            f"cannot project data of shape {x.shape} with columns of shape {entries.shape}"
        )
    return x @ entries


def sparsity_of(m: ProjectionMatrix | np.ndarray) -> float:
    """Fraction of exactly-zero entries in the matrix."""
    entries = m.entries if isinstance(m, ProjectionMatrix) else np.asarray(m)
    if entries.size == 0:
        raise ParameterError("sparsity of an empty matrix is undefined")
    return float(np.mean(entries == 0.0))
