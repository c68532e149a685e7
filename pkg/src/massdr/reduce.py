"""Preliminary dimension reduction for very wide data.

When d greatly exceeds n, the search first maps the data to an intermediate
dimension m, by principal components, by marginal correlation screening, or
by screening among all principal component scores.  A fitted
:class:`Reduction` remembers a fingerprint of its training data so that test
rows can only ever be transformed, never refitted.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .numerics import svd, validate_data_matrix


def fingerprint(x: np.ndarray) -> str:
    """Stable digest of a data matrix, used for the train/test firewall."""
    h = hashlib.sha256()
    h.update(str(x.shape).encode())
    h.update(np.ascontiguousarray(x).tobytes())
    return h.hexdigest()[:16]


def intermediate_dim(n: int) -> int:
    """Default intermediate dimension ``round(2 n / ln n)``."""
    if n < 8:
        raise ParameterError(f"need n >= 8 to pick an intermediate dimension, got {n}")
    return int(np.floor(2.0 * n / np.log(n) + 0.5))


@dataclass(frozen=True)
class Reduction:
    """A fitted preliminary reduction of kind pca, sis, pca_sis, or none."""

    kind: str
    m: int
    center: np.ndarray | None
    loadings: np.ndarray | None
    indices: np.ndarray | None
    fitted_on: str
    rank_deficient: bool = False

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Transform rows with the stored fit; never refits."""
        x = validate_data_matrix(x, "x")
        if self.kind == "none":
            return x
        if self.kind == "sis":
            if x.shape[1] <= int(np.max(self.indices)):
                raise ShapeError(
                    f"x has {x.shape[1]} columns but the reduction keeps "
                    f"index {int(np.max(self.indices))}"
                )
            return x[:, self.indices]
        if x.shape[1] != self.center.shape[0]:
            raise ShapeError(
                f"x has {x.shape[1]} columns but the reduction was fitted on "
                f"{self.center.shape[0]}"
            )
        return (x - self.center) @ self.loadings


def pca_reduce(x: np.ndarray, m: int) -> Reduction:
    """Top-m principal component projection of centered (not scaled) data."""
    x = validate_data_matrix(x, "x")
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    center = x.mean(axis=0)
    u, s, v = svd(x - center)
    rank = int(np.sum(s > s[0] * 1e-12)) if s.size and s[0] > 0.0 else 0
    if rank == 0:
        raise ParameterError("data has zero variance; no principal components exist")
    m_eff = min(m, rank)
    return Reduction(
        kind="pca",
        m=m_eff,
        center=center,
        loadings=v[:, :m_eff],
        indices=None,
        fitted_on=fingerprint(x),
        rank_deficient=m_eff < m,
    )


def _abs_corr_with(y: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """|Pearson correlation| of each column with y; zero-variance gives 0."""
    yc = y - y.mean()
    sy = float(np.sqrt(yc @ yc))
    centered = cols - cols.mean(axis=0)
    norms = np.sqrt(np.einsum("ij,ij->j", centered, centered))
    out = np.zeros(cols.shape[1])
    ok = (norms > 0.0) & (sy > 0.0)
    if np.any(ok):
        out[ok] = np.abs(yc @ centered[:, ok]) / (norms[ok] * sy)
    return out


def sis_reduce(x: np.ndarray, y: np.ndarray, m: int) -> Reduction:
    """Keep the m columns most correlated in absolute value with the labels."""
    x = validate_data_matrix(x, "x")
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != x.shape[0]:
        raise ShapeError(f"y has {y.shape[0]} entries but x has {x.shape[0]} rows")
    if not 1 <= m <= x.shape[1]:
        raise ParameterError(f"m must lie in [1, {x.shape[1]}], got {m}")
    scores = _abs_corr_with(y, x)
    order = np.argsort(-scores, kind="stable")
    return Reduction(
        kind="sis",
        m=m,
        center=None,
        loadings=None,
        indices=np.sort(order[:m]),
        fitted_on=fingerprint(x),
    )


def pca_sis_reduce(x: np.ndarray, y: np.ndarray, m: int) -> Reduction:
    """Screen all principal component scores by correlation with the labels.

    A full PCA (up to the data rank) is taken first; the m score columns
    most correlated with y are kept, whatever their variance rank.
    """
    x = validate_data_matrix(x, "x")
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != x.shape[0]:
        raise ShapeError(f"y has {y.shape[0]} entries but x has {x.shape[0]} rows")
    center = x.mean(axis=0)
    u, s, v = svd(x - center)
    rank = int(np.sum(s > s[0] * 1e-12)) if s.size and s[0] > 0.0 else 0
    if rank == 0:
        raise ParameterError("data has zero variance; no principal components exist")
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    scores = (x - center) @ v[:, :rank]
    corr = _abs_corr_with(y, scores)
    order = np.argsort(-corr, kind="stable")
    m_eff = min(m, rank)
    chosen = np.sort(order[:m_eff])
    return Reduction(
        kind="pca_sis",
        m=m_eff,
        center=center,
        loadings=v[:, :rank][:, chosen],
        indices=chosen,
        fitted_on=fingerprint(x),
        rank_deficient=m_eff < m,
    )


def no_reduction(x: np.ndarray) -> Reduction:
    """Identity reduction, for pipelines that search the raw columns."""
    x = validate_data_matrix(x, "x")
    return Reduction(
        kind="none",
        m=x.shape[1],
        center=None,
        loadings=None,
        indices=None,
        fitted_on=fingerprint(x),
    )
