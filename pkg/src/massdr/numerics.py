"""Deterministic random streams and shared linear-algebra helpers.

All stochastic routines in the package draw from an :class:`RngStream`, a
frozen value object keyed by an integer seed plus a path of child labels.
Two streams with the same (seed, path) always yield identical draws; streams
with different paths are statistically independent.  This is what makes
whole-pipeline runs reproducible bit for bit while still letting replications,
iterations, and methods consume independent randomness.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ParameterError, ShapeError

GH_CLAMP_LIMIT = 1e12


def _label_token(label: str | int) -> int:
    """Map a child label to a stable 64-bit integer token."""
    if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
        return int(label) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.sha256(str(label).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class RngStream:
    """Splittable, counter-based random stream.

    Parameters
    ----------
    seed : int
        Master seed of the run.
    path : tuple[int, ...]
        Tokens of the child labels taken from the root, in order.
    """

    seed: int
    path: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ParameterError(f"seed must be an integer, got {self.seed!r}")
        if int(self.seed) < 0:
            raise ParameterError(f"seed must be non-negative, got {self.seed}")

    def child(self, label: str | int) -> "RngStream":
        """Derive an independent sub-stream identified by ``label``."""
        return RngStream(int(self.seed), self.path + (_label_token(label),))

    def derive_seed(self) -> int:
        """Collapse (seed, path) into a single 63-bit integer seed."""
        h = hashlib.sha256(repr((int(self.seed),) + self.path).encode("ascii"))
        return int.from_bytes(h.digest()[:8], "little") >> 1

    def generator(self) -> np.random.Generator:
        """Fresh counter-based generator positioned at the stream origin."""
        seq = np.random.SeedSequence(entropy=int(self.seed), spawn_key=self.path)
        return np.random.Generator(np.random.Philox(seq))


def validate_data_matrix(x: np.ndarray, name: str = "x") -> np.ndarray:
    """Coerce to a finite 2-d float array with at least one row and column."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-d, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains non-finite entries")
    return arr


def svd(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD wrapper returning ``(u, s, v)`` with ``m = u @ diag(s) @ v.T``.

    Singular values are non-increasing.  Raises :class:`NumericalError` if the
    underlying routine fails to converge and :class:`ParameterError` on
    non-finite input.
    """
    arr = validate_data_matrix(m, "svd input")
    try:
        u, s, vt = np.linalg.svd(arr, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"SVD did not converge for a {arr.shape[0]}x{arr.shape[1]} matrix"
        ) from exc
    return u, s, vt.T


def _correlated_normals(
    n: int, d: int, offdiag_corr: float, gen: np.random.Generator
) -> np.ndarray:
    """n x d standard normals with constant pairwise correlation."""
    z = gen.standard_normal((n, d))
    if d == 1 or offdiag_corr == 0.0:
        return z
    sigma = np.full((d, d), offdiag_corr)
    np.fill_diagonal(sigma, 1.0)
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise ParameterError(
            f"correlation {offdiag_corr} does not give a positive definite matrix"
        ) from exc
    return z @ chol.T


def _check_sample_args(n: int, d: int, offdiag_corr: float) -> None:
    if n < 1 or d < 1:
        raise ParameterError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if not 0.0 <= offdiag_corr < 1.0:
        raise ParameterError(f"offdiag_corr must lie in [0, 1), got {offdiag_corr}")


def sample_mvnormal(
    n: int, d: int, var: float, offdiag_corr: float, rng: RngStream
) -> np.ndarray:
    """Draw ``n`` rows from N(0, Sigma) with Sigma = var * [(1-r) I + r J].

    ``J`` is the all-ones matrix, so every pair of coordinates has the same
    correlation ``offdiag_corr``.
    """
    _check_sample_args(n, d, offdiag_corr)
    if var <= 0.0:
        raise ParameterError(f"var must be positive, got {var}")
    z = _correlated_normals(n, d, offdiag_corr, rng.generator())
    return z * np.sqrt(var)


def sample_gh(
    n: int,
    d: int,
    g: float,
    h: float,
    offdiag_corr: float,
    rng: RngStream,
    meta: dict | None = None,
) -> np.ndarray:
    """Draw from the g-and-h distribution applied marginally to correlated normals.

    For z ~ N(0,1) the marginal transform is ``T(z) = ((exp(g z) - 1) / g) *
    exp(h z^2 / 2)`` when ``g != 0`` and ``z * exp(h z^2 / 2)`` when ``g == 0``.
    ``g`` controls skewness and ``h >= 0`` thickens the tails.  Outputs are
    clamped to ``+/- 1e12``; the number of clamped entries is written to
    ``meta["gh_clamped"]`` when a dict is supplied.
    """
    _check_sample_args(n, d, offdiag_corr)
    if h < 0.0:
        raise ParameterError(f"h must be non-negative, got {h}")
    z = _correlated_normals(n, d, offdiag_corr, rng.generator())
    with np.errstate(over="ignore"):
        tail = np.exp(h * z * z / 2.0)
        if g == 0.0:
            raw = z * tail
        else:
            raw = np.expm1(g * z) / g * tail
    clamped = int(np.count_nonzero(np.abs(raw) > GH_CLAMP_LIMIT))
    if meta is not None:
        meta["gh_clamped"] = meta.get("gh_clamped", 0) + clamped
    return np.clip(raw, -GH_CLAMP_LIMIT, GH_CLAMP_LIMIT)
