"""The adaptive stochastic search over sparse projection directions.

Each iteration carries the p best columns found so far, pads the bank with
freshly generated sparse random columns, projects the data, and keeps the
first p columns to enter a LARS path against the labels.  In adaptive mode
the average sparsity of the kept columns becomes the generation target for
the next iteration; in fixed mode the target never moves.  The bank shrinks
linearly over the run, narrowing the search as it converges.  A nonlinear
variant searches spline coefficient blocks instead of plain directions,
under a fixed per-function curvature budget.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .classify import LogisticModel, fit_logistic, mcr, predict_classes
from .errors import ParameterError, ShapeError
from .numerics import RngStream, validate_data_matrix
from .projection import (
    ProjectionMatrix,
    SparsitySpec,
    gen_candidate_columns,
    sparsity_of,
)
from .selection import lars_path, select_first_p
from .spline import (
    SplineCoeffs,
    build_ncs_basis,
    central_domain,
    curvature_gram,
    expand_features,
    gen_candidate_theta,
)


@dataclass(frozen=True)
class MassConfig:
    """Configuration of one search run.

    ``mode`` is "linear" for sparse direction search or "spline" for the
    nonlinear variant with curvature level ``lam``.  ``sparsity_policy`` is
    "adaptive" (the target tracks the kept columns) or "fixed" (the target
    stays at ``fixed_xi`` for the whole run).  ``l_start``/``l_end`` default
    to ceil(n/2) and 2p when left as None.
    """

    p: int
    iters: int = 500
    seed: int = 0
    mode: str = "linear"
    lam: float = 0.0
    spline_df: int = 6
    grid_points: int = 200
    sparsity_policy: str = "adaptive"
    xi0: float = 0.5
    fixed_xi: float | None = None
    alpha: float = 5.0
    l_start: int | None = None
    l_end: int | None = None

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ParameterError(f"p must be >= 1, got {self.p}")
        if self.iters < 1:
            raise ParameterError(f"iters must be >= 1, got {self.iters}")
        if self.mode not in ("linear", "spline"):
            raise ParameterError(f"mode must be 'linear' or 'spline', got {self.mode!r}")
        if self.lam < 0.0:
            raise ParameterError(f"lam must be >= 0, got {self.lam}")
        if self.mode == "linear" and self.lam != 0.0:
            raise ParameterError("curvature lam only applies to spline mode")
        if self.sparsity_policy not in ("adaptive", "fixed"):
            raise ParameterError(
                f"sparsity_policy must be 'adaptive' or 'fixed', got {self.sparsity_policy!r}"
            )
        if self.sparsity_policy == "fixed":
            if self.fixed_xi is None or not 0.0 <= self.fixed_xi < 1.0:
                raise ParameterError(
                    "fixed sparsity policy needs fixed_xi in [0, 1), got "
                    f"{self.fixed_xi!r}"
                )
        if not 0.0 <= self.xi0 < 1.0:
            raise ParameterError(f"xi0 must lie in [0, 1), got {self.xi0}")
        if self.alpha <= 0.0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if self.spline_df < 3:
            raise ParameterError(f"spline_df must be >= 3, got {self.spline_df}")
        if self.l_end is not None and self.l_end <= self.p:
            raise ParameterError(f"l_end must exceed p={self.p}, got {self.l_end}")
        if (
            self.l_start is not None
            and self.l_end is not None
            and self.l_start < self.l_end
        ):
            raise ParameterError(
                f"l_start ({self.l_start}) must be >= l_end ({self.l_end})"
            )


def resolve_bank_sizes(config: MassConfig, n: int) -> MassConfig:
    """Fill in the default bank schedule endpoints for a given sample size."""
    l_end = config.l_end if config.l_end is not None else max(2 * config.p, config.p + 1)
    l_start = config.l_start if config.l_start is not None else int(np.ceil(n / 2.0))
    l_start = max(l_start, l_end)
    return replace(config, l_start=l_start, l_end=l_end)


def l_schedule(iteration: int, config: MassConfig) -> int:
    """Bank size at a 1-based iteration: linear from l_start down to l_end.

    Values are rounded to the nearest integer and never fall to p or below.
    """
    if config.l_start is None or config.l_end is None:
        raise ParameterError(
            "bank schedule endpoints are unresolved; call resolve_bank_sizes"
        )
    if not 1 <= iteration <= config.iters:
        raise ParameterError(
            f"iteration must lie in [1, {config.iters}], got {iteration}"
        )
    if config.iters == 1:
        value = float(config.l_start)
    else:
        frac = (iteration - 1) / (config.iters - 1)
        value = config.l_start + frac * (config.l_end - config.l_start)
    return max(int(np.floor(value + 0.5)), config.p + 1)


def next_sparsity(selected: np.ndarray, config: MassConfig) -> float:
    """Sparsity target for the next iteration under the configured policy.

    Adaptive mode measures the kept columns: elementwise zero fraction for
    linear search, all-zero block fraction for spline search (elementwise
    sparsity of spline coefficients would conflate masked predictors with the
    curvature budget).
    """
    if config.sparsity_policy == "fixed":
        return float(config.fixed_xi)
    if config.mode == "spline":
        blocks = np.asarray(selected)
        if blocks.ndim != 3:
            raise ShapeError(f"expected (p, d, q) blocks, got shape {blocks.shape}")
        return float(np.mean(np.all(blocks == 0.0, axis=2)))
    return sparsity_of(selected)


@dataclass(frozen=True)
class MassTrace:
    """Per-iteration diagnostics; every array has length ``iters``."""

    deviance: np.ndarray
    xi_bar: np.ndarray
    bank_size: np.ndarray
    shortfall: np.ndarray
    test_mcr: np.ndarray | None = None


@dataclass(frozen=True)
class MassResult:
    """Outcome of a run: the final subspace, classifier, and trace.

    ``scale_center``/``scale_sd`` hold the training standardization of the
    spline variant (None for linear runs) so new rows can be transformed.
    """

    projection: ProjectionMatrix | SplineCoeffs
    model: LogisticModel
    z_final: np.ndarray
    trace: MassTrace
    final_sparsity: float
    config: MassConfig
    scale_center: np.ndarray | None = None
    scale_sd: np.ndarray | None = None

    def transform(self, x: np.ndarray) -> np.ndarray:
        """Map raw rows into the learned subspace."""
        x = validate_data_matrix(x, "x")
        if isinstance(self.projection, ProjectionMatrix):
            return x @ self.projection.entries
        scaled = (x - self.scale_center) / self.scale_sd
        return expand_features(scaled, self.projection.basis) @ self.projection.theta

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Hard labels for raw rows."""
        return predict_classes(self.model, self.transform(x))


def run_mass(
    x: np.ndarray,
    y: np.ndarray,
    config: MassConfig,
    eval_set: tuple[np.ndarray, np.ndarray] | None = None,
    inspect: Callable[[int, np.ndarray, list[int]], None] | None = None,
) -> MassResult:
    """Run the full search and return the fitted result.

    ``eval_set`` optionally supplies held-out rows and labels whose
    misclassification rate is traced each iteration; tracing consumes no
    randomness, so a run with and without an eval set follows the identical
    search path.  ``inspect`` is a read-only hook called once per iteration
    with (iteration, flattened candidate bank, kept positions).
    """
    x = validate_data_matrix(x, "x")
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != x.shape[0]:
        raise ShapeError(f"y must be 1-d with {x.shape[0]} entries, got {y.shape}")
    n, d_raw = x.shape
    config = resolve_bank_sizes(config, n)
    spline = config.mode == "spline"

    x_eval = y_eval = x_eval_work = None
    if eval_set is not None:
        x_eval = validate_data_matrix(eval_set[0], "eval x")
        y_eval = np.asarray(eval_set[1])
        if x_eval.shape[1] != d_raw:
            raise ShapeError(
                f"eval x has {x_eval.shape[1]} columns, training x has {d_raw}"
            )

    scale_center = scale_sd = basis = op = None
    if spline:
        scale_center = x.mean(axis=0)
        scale_sd = x.std(axis=0)
        scale_sd[scale_sd == 0.0] = 1.0
        scaled = (x - scale_center) / scale_sd
        basis = build_ncs_basis(central_domain(scaled), config.spline_df)
        op = curvature_gram(basis, max(config.grid_points, 10 * config.spline_df))
        x_work = expand_features(scaled, basis)
        if x_eval is not None:
            x_eval_work = expand_features((x_eval - scale_center) / scale_sd, basis)
    else:
        x_work = x
        x_eval_work = x_eval

    stream = RngStream(config.seed)
    p = config.p

    def generate(count: int, target: float, rng: RngStream):
        spec = SparsitySpec(target=target, alpha=config.alpha)
        if spline:
            return gen_candidate_theta(d_raw, count, config.lam, spec, op, rng)
        return gen_candidate_columns(d_raw, count, spec, rng)

    def flatten(bank: np.ndarray) -> np.ndarray:
        # (count, d, q) stacks become (q d, count) coefficient matrices
        if spline:
            return bank.transpose(1, 2, 0).reshape(x_work.shape[1], bank.shape[0])
        return bank

    def select(bank: np.ndarray) -> tuple[np.ndarray, list[int], bool]:
        z = x_work @ flatten(bank)
        path = lars_path(z, y, max_steps=min(p, n - 1, z.shape[1]))
        chosen, short = select_first_p(path, p)
        if short:
            # top up by correlation with the labels among columns that never entered
            left = [j for j in range(z.shape[1]) if j not in chosen]
            zc = z[:, left] - z[:, left].mean(axis=0)
            norms = np.sqrt(np.einsum("ij,ij->j", zc, zc))
            norms[norms == 0.0] = np.inf
            yc = np.asarray(y, dtype=float) - float(np.mean(y))
            score = np.abs(yc @ zc) / norms
            order = np.argsort(-score, kind="stable")
            chosen = chosen + [left[i] for i in order[: p - len(chosen)]]
        return z[:, chosen], chosen, short

    def take(bank: np.ndarray, idx: list[int]) -> np.ndarray:
        return bank[idx] if spline else bank[:, idx]

    target = config.fixed_xi if config.sparsity_policy == "fixed" else config.xi0

    init_bank = generate(l_schedule(1, config), target, stream.child("init"))
    z_sel, keep_idx, _ = select(init_bank)
    kept = take(init_bank, keep_idx)
    target = next_sparsity(kept, config)

    iters = config.iters
    dev_trace = np.empty(iters)
    xi_trace = np.empty(iters)
    bank_trace = np.empty(iters, dtype=int)
    short_trace = np.zeros(iters, dtype=bool)
    mcr_trace = np.empty(iters) if x_eval is not None else None
    model = None

    for it in range(1, iters + 1):
        bank_size = l_schedule(it, config)
        fresh = generate(bank_size - p, target, stream.child(f"iter{it}"))
        bank = np.concatenate([kept, fresh], axis=0 if spline else 1)
        z_sel, keep_idx, short = select(bank)
        kept = take(bank, keep_idx)
        target = next_sparsity(kept, config)
        model = fit_logistic(z_sel, y)

        dev_trace[it - 1] = model.deviance if np.isfinite(model.deviance) else np.nan
        xi_trace[it - 1] = target
        bank_trace[it - 1] = bank_size
        short_trace[it - 1] = short
        if mcr_trace is not None:
            z_ev = x_eval_work @ flatten(kept)
            mcr_trace[it - 1] = mcr(predict_classes(model, z_ev), y_eval)
        if inspect is not None:
            inspect(it, flatten(bank), keep_idx)

    final_cols = flatten(kept)
    if spline:
        projection = SplineCoeffs(theta=final_cols, lam=config.lam, basis=basis)
        final_sparsity = projection.block_sparsity
    else:
        projection = ProjectionMatrix(entries=final_cols)
        final_sparsity = sparsity_of(projection)

    trace = MassTrace(
        deviance=dev_trace,
        xi_bar=xi_trace,
        bank_size=bank_trace,
        shortfall=short_trace,
        test_mcr=mcr_trace,
    )
    return MassResult(
        projection=projection,
        model=model,
        z_final=z_sel,
        trace=trace,
        final_sparsity=final_sparsity,
        config=config,
        scale_center=scale_center,
        scale_sd=scale_sd,
    )
