"""Natural cubic spline features with curvature-controlled random coefficients.

The nonlinear search replaces each linear combination of predictors with a sum
of smooth univariate functions, one per predictor, expressed in a shared
natural cubic spline basis that vanishes at zero.  A candidate column is then
a coefficient block per predictor.  To make candidates comparable, every
block is rotated into the eigenbasis of the curvature Gram matrix, its curved
part is rescaled to a fixed total curvature, and its linear part is
standardized so the slopes of the per-predictor functions have unit norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateBasisError,
    DegenerateSlopesError,
    DomainError,
    GenerationError,
    ParameterError,
    ShapeError,
)
from .numerics import RngStream
from .projection import SparsitySpec

_RESAMPLE_CAP = 100


@dataclass(frozen=True)
class NcsBasis:
    """Natural cubic spline basis with q functions, all zero at t = 0.

    Built from q + 1 equally spaced knots on ``domain``.  Outside the knot
    range every basis function continues linearly (zero second derivative),
    and the first function is the pure linear term.
    """

    q: int
    knots: np.ndarray
    domain: tuple[float, float]

    def _truncated(self, t: np.ndarray) -> np.ndarray:
        """Raw natural basis values N_1..N_q before centering at zero."""
        k = self.knots
        last = k[-1]
        out = np.empty(t.shape + (self.q,))
        out[..., 0] = t
        cube_last = np.maximum(t - last, 0.0) ** 3
        d_ref = (np.maximum(t - k[-2], 0.0) ** 3 - cube_last) / (last - k[-2])
        for j in range(self.q - 1):
            d_j = (np.maximum(t - k[j], 0.0) ** 3 - cube_last) / (last - k[j])
            out[..., j + 1] = d_j - d_ref
        return out

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        """Basis values, shape ``t.shape + (q,)``; b(0) is exactly zero."""
        t = np.asarray(t, dtype=float)
        return self._truncated(t) - self._truncated(np.zeros(1))[0]

    def second_derivative(self, t: np.ndarray) -> np.ndarray:
        """Second derivatives of the basis functions at ``t``."""
        t = np.asarray(t, dtype=float)
        k = self.knots
        last = k[-1]
        out = np.zeros(t.shape + (self.q,))
        ramp_last = np.maximum(t - last, 0.0)
        d2_ref = 6.0 * (np.maximum(t - k[-2], 0.0) - ramp_last) / (last - k[-2])
        for j in range(self.q - 1):
            d2_j = 6.0 * (np.maximum(t - k[j], 0.0) - ramp_last) / (last - k[j])
            out[..., j + 1] = d2_j - d2_ref
        return out


def central_domain(values: np.ndarray, coverage: float = 0.99) -> tuple[float, float]:
    """Quantile range of the training values covering the central mass.

    Basis knots are spread evenly over the domain, so tying the domain to
    extreme order statistics parks most of the curvature budget between the
    outermost observations, where no data falls.  The central range keeps the
    constrained curvature acting where the distribution actually lives; the
    few points outside are clamped at expansion time.
    """
    if not 0.0 < coverage < 1.0:
        raise ParameterError(f"coverage must lie in (0, 1), got {coverage}")
    flat = np.asarray(values, dtype=float).ravel()
    if flat.size < 2:
        raise ParameterError("need at least two values to set a domain")
    tail = (1.0 - coverage) / 2.0
    lo = float(np.quantile(flat, tail))
    hi = float(np.quantile(flat, 1.0 - tail))
    # keep zero strictly inside so the vanish-at-zero pin stays meaningful
    return min(lo, -1e-8), max(hi, 1e-8)


def build_ncs_basis(domain: tuple[float, float], q: int) -> NcsBasis:
    """Basis of dimension ``q`` from ``q + 1`` equally spaced knots on ``domain``.

    One extra knot is needed because requiring every function to vanish at
    zero removes one degree of freedom from the natural spline space.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise ParameterError(f"domain must satisfy lo < hi, got ({lo}, {hi})")
    if q < 3:
        raise ParameterError(f"basis dimension q must be >= 3, got {q}")
    knots = np.linspace(lo, hi, q + 1)
    return NcsBasis(q=q, knots=knots, domain=(lo, hi))


@dataclass(frozen=True)
class CurvatureOperator:
    """Eigendecomposition of the average-curvature Gram matrix.

    ``gram = u @ diag(d) @ u.T`` with eigenvalues sorted descending and the
    last one exactly zero: the null direction is the pure-slope component of
    the basis.  ``slope_scale`` is the slope of that null-direction function,
    used to express slope standardization in rotated coordinates.

    The non-null eigendirections are orthogonal to the slope direction only
    in coefficient space; as functions they still carry a linear trend, which
    would otherwise dwarf the unit-norm slope term and leave the curvature
    level with no real control over how nonlinear a candidate is.
    ``lin_proj`` holds each curved eigenfunction's least-squares slope against
    the null-direction function over the grid; the constraint ops subtract it
    so the slope coordinate alone carries the linear behavior of the block.
    """

    gram: np.ndarray
    u: np.ndarray
    d: np.ndarray
    slope_scale: float
    lin_proj: np.ndarray


def curvature_gram(basis: NcsBasis, grid_points: int) -> CurvatureOperator:
    """Average outer product of second-derivative vectors over a uniform grid.

    The grid must be dense enough (``grid_points >= 10 q``) that the only
    zero eigenvalue is the genuine linear direction of the basis.
    """
    if grid_points < 10 * basis.q:
        raise ParameterError(
            f"grid_points must be >= 10 q = {10 * basis.q}, got {grid_points}"
        )
    lo, hi = basis.domain
    grid = np.linspace(lo, hi, grid_points)
    b2 = basis.second_derivative(grid)
    gram = b2.T @ b2 / grid_points
    evals, evecs = np.linalg.eigh(gram)
    evals = evals[::-1].copy()
    evecs = evecs[:, ::-1].copy()
    if evals[0] <= 0.0:
        raise DegenerateBasisError("curvature Gram matrix is identically zero")
    null_count = int(np.sum(evals < 1e-10 * evals[0]))
    if null_count != 1:
        raise DegenerateBasisError(
            f"expected exactly one zero curvature eigenvalue, found {null_count}"
        )
    evals[-1] = 0.0
    funcs = basis.evaluate(grid) @ evecs
    vals = funcs[:, -1]
    slope = float(grid @ vals / (grid @ grid))
    if slope < 0.0:
        evecs[:, -1] = -evecs[:, -1]
        vals = -vals
        slope = -slope
    if slope == 0.0:
        raise DegenerateBasisError("null-direction function has zero slope")
    lin_proj = funcs[:, :-1].T @ vals / (vals @ vals)
    return CurvatureOperator(
        gram=gram, u=evecs, d=evals, slope_scale=slope, lin_proj=lin_proj
    )


def constrain_stack(
    theta_raw: np.ndarray, lam: float, op: CurvatureOperator
) -> tuple[np.ndarray, np.ndarray]:
    """Constrain and standardize a stack of coefficient blocks.

    ``theta_raw`` has shape ``(m, d, q)``: m candidate columns, each holding a
    q-vector of spline coefficients per predictor.  Per column, every
    non-zero block is rescaled in the rotated basis so its curvature energy
    equals ``lam`` exactly (``lam == 0`` zeroes the curved part), then the
    slope components are jointly scaled so the per-predictor slopes have unit
    Euclidean norm.  Finally the linear trend the curved components carry as
    functions is moved out of them and into the slope coordinate, so the
    standardized slopes describe the actual linear behavior of each block and
    the curved remainder is trend-free.  The transfer is along the
    zero-curvature direction, so the curvature identity is untouched.

    Returns the constrained stack and a boolean mask of degenerate columns
    (all slopes zero) which must be resampled by the caller.
    """
    if lam < 0.0:
        raise ParameterError(f"curvature level lam must be >= 0, got {lam}")
    theta_raw = np.asarray(theta_raw, dtype=float)
    if theta_raw.ndim != 3 or theta_raw.shape[2] != op.u.shape[0]:
        raise ShapeError(
            f"expected stack of shape (m, d, q={op.u.shape[0]}), got {theta_raw.shape}"
        )
    star = theta_raw @ op.u
    curv = star[:, :, :-1]
    if lam == 0.0:
        curv[:] = 0.0
    else:
        energy = np.einsum("mdk,mdk,k->md", curv, curv, op.d[:-1])
        scale = np.ones_like(energy)
        nz = energy > 0.0
        scale[nz] = np.sqrt(lam / energy[nz])
        curv *= scale[:, :, None]
    slopes = star[:, :, -1]
    norm2 = op.slope_scale**2 * np.einsum("md,md->m", slopes, slopes)
    degenerate = norm2 == 0.0
    safe = np.where(degenerate, 1.0, norm2)
    star[:, :, -1] = slopes / np.sqrt(safe)[:, None] - curv @ op.lin_proj
    return star @ op.u.T, degenerate


def constrain_and_standardize(
    theta_raw: np.ndarray, lam: float, op: CurvatureOperator
) -> np.ndarray:
    """Constrain a single ``(d, q)`` coefficient block.

    Raises :class:`DegenerateSlopesError` when every slope is zero,
    signalling the caller to resample the block.
    """
    theta_raw = np.asarray(theta_raw, dtype=float)
    if theta_raw.ndim != 2:
        raise ShapeError(f"expected a (d, q) block, got shape {theta_raw.shape}")
    out, degenerate = constrain_stack(theta_raw[None, :, :], lam, op)
    if degenerate[0]:
        raise DegenerateSlopesError("all slope components are zero; resample")
    return out[0]


def gen_candidate_theta(
    d: int,
    count: int,
    lam: float,
    spec: SparsitySpec,
    op: CurvatureOperator,
    rng: RngStream,
) -> np.ndarray:
    """Generate ``count`` constrained coefficient stacks of shape (count, d, q).

    Blocks are masked at the predictor level with per-column Bernoulli masks,
    mirroring the linear candidate generator: with ``lam == 0`` the effective
    columns coincide with linear sparse random directions.  Gaussians are
    drawn directly in the rotated eigenbasis, which is distribution
    equivalent to drawing raw blocks, and the curved components are only
    drawn when ``lam > 0``.
    """
    if d < 1 or count < 1:
        raise ParameterError(f"need d >= 1 and count >= 1, got d={d}, count={count}")
    q = op.u.shape[0]
    gen = rng.generator()
    out = np.empty((count, d, q))
    pending = np.arange(count)
    for _ in range(_RESAMPLE_CAP):
        k = pending.size
        if spec.target == 0.0:
            xis = np.zeros(k)
        else:
            a, b = spec.beta_params()
            xis = gen.beta(a, b, size=k)
        slopes = gen.standard_normal((d, k))
        mask = gen.random((d, k)) < (1.0 - xis)
        star = np.zeros((k, d, q))
        star[:, :, -1] = (slopes * mask).T
        if lam > 0.0:
            curv = gen.standard_normal((d, k, q - 1))
            star[:, :, :-1] = np.transpose(curv * mask[:, :, None], (1, 0, 2))
        constrained, degenerate = constrain_stack(star @ op.u.T, lam, op)
        ok = ~degenerate
        out[pending[ok]] = constrained[ok]
        pending = pending[~ok]
        if pending.size == 0:
            return out
    raise GenerationError(
        f"failed to draw a column with a non-zero slope after {_RESAMPLE_CAP} "
        f"rounds (target sparsity {spec.target})"
    )


@dataclass(frozen=True)
class SplineCoeffs:
    """Final coefficient matrix of a nonlinear search, with its basis.

    ``theta`` has shape ``(q * d, p)``; rows are grouped in q-sized blocks,
    one block per predictor, matching the layout of :func:`expand_features`.
    """

    theta: np.ndarray
    lam: float
    basis: NcsBasis

    @property
    def shape(self) -> tuple[int, int]:
        return self.theta.shape

    def blocks(self) -> np.ndarray:
        """Coefficients viewed as shape (p, d, q)."""
        qd, p = self.theta.shape
        q = self.basis.q
        return np.transpose(self.theta.reshape(qd // q, q, p), (2, 0, 1))

    @property
    def block_sparsity(self) -> float:
        """Fraction of all-zero per-predictor blocks."""
        return float(np.mean(np.all(self.blocks() == 0.0, axis=2)))


def expand_features(x: np.ndarray, basis: NcsBasis) -> np.ndarray:
    """Evaluate the basis on every entry of ``x``: n x d becomes n x (q d).

    Values are clamped to the basis domain; values farther than three domain
    widths outside it raise :class:`DomainError`, since that indicates the
    basis was fitted on different data.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ShapeError(f"x must be 2-d, got shape {x.shape}")
    lo, hi = basis.domain
    width = hi - lo
    if np.any(x < lo - 3.0 * width) or np.any(x > hi + 3.0 * width):
        raise DomainError("values fall more than three domain widths outside the basis")
    clamped = np.clip(x, lo, hi)
    n, d = x.shape
    vals = basis.evaluate(clamped.ravel())
    return vals.reshape(n, d * basis.q)
