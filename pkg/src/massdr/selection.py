"""Least angle regression with the lasso modification.

Used as the screening device of the stochastic search: candidate columns are
ranked by the order in which they first enter the LARS path against the
binary labels, and the first p entrants are kept.  The path machinery also
reports coefficients, residual sums of squares, and correlation levels at
every breakpoint so downstream diagnostics can replay the fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SelectionError, ShapeError

_CORR_TOL = 1e-12
_GAMMA_TOL = 1e-12


@dataclass
class LarsPath:
    """Breakpoint-level record of a LARS-lasso fit.

    ``entry_order`` lists original column indices by first activation only;
    a variable that is dropped and re-enters appears once.  ``coef_path``
    holds original-scale coefficients, one row per breakpoint starting from
    the all-zero solution.  ``corr_path`` is the maximum absolute correlation
    with the residual at each breakpoint (computed on the internally
    standardized columns) and is non-increasing along the path.
    """

    entry_order: list[int]
    coef_path: np.ndarray
    rss_path: np.ndarray
    corr_path: np.ndarray
    active_path: list[list[int]]
    skipped: list[int]


def lars_path(z: np.ndarray, y: np.ndarray, max_steps: int) -> LarsPath:
    """Run LARS with the lasso modification until ``max_steps`` variables entered.

    Columns are centered and scaled to unit norm internally, so the path is
    invariant to the scale of individual columns; reported coefficients are
    mapped back to the original scale.  Constant columns are excluded up
    front and recorded in ``skipped``; if every column is constant a
    :class:`SelectionError` is raised.  The path also stops early when the
    residual is numerically uncorrelated with all columns or when the active
    set reaches the degrees-of-freedom limit ``min(n - 1, cols)``.
    """
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if z.ndim != 2:
        raise ShapeError(f"z must be 2-d, got shape {z.shape}")
    n, m = z.shape
    if y.shape[0] != n:
        raise ShapeError(f"y has {y.shape[0]} rows but z has {n}")
    if n < 2:
        raise ParameterError(f"need at least 2 observations, got {n}")
    if not 1 <= max_steps <= min(n - 1, m):
        raise ParameterError(
            f"max_steps must lie in [1, min(n-1, cols)] = [1, {min(n - 1, m)}], "
            f"got {max_steps}"
        )

    centered = z - z.mean(axis=0)
    norms = np.sqrt(np.einsum("ij,ij->j", centered, centered))
    # relative threshold: a constant column leaves rounding residue of order
    # eps * |column|, which unit scaling would blow up into a junk direction
    floor = 1e-9 * np.maximum(1.0, np.abs(z).max(axis=0))
    keep = norms > floor
    skipped = [int(j) for j in np.flatnonzero(~keep)]
    live = np.flatnonzero(keep)
    if live.size == 0:
        raise SelectionError("all columns are constant; nothing to select")
    x = centered[:, live] / norms[live]
    yc = y - y.mean()
    m_eff = live.size
    df_limit = min(n - 1, m_eff)

    coef = np.zeros(m_eff)
    active: list[int] = []
    entered: list[int] = []
    excluded = np.zeros(m_eff, dtype=bool)
    drop_pending = False

    coef_snapshots = [np.zeros(m_eff)]
    rss_list = [float(yc @ yc)]
    corr_list = [float(np.max(np.abs(x.T @ yc))) if m_eff else 0.0]
    active_snapshots: list[list[int]] = [[]]

    cap = 8 * max_steps + 16
    for _ in range(cap):
        resid = yc - x @ coef
        c = x.T @ resid
        cmax = float(np.max(np.abs(c)))
        if cmax < _CORR_TOL:
            break
        if not drop_pending:
            mask = np.ones(m_eff, dtype=bool)
            mask[active] = False
            mask &= ~excluded
            if not np.any(mask):
                break
            cand = np.where(mask, np.abs(c), -np.inf)
            j = int(np.argmax(cand))
            active.append(j)
            if j not in entered:
                entered.append(j)
        drop_pending = False

        xa = x[:, active]
        s = np.sign(c[active])
        s[s == 0.0] = 1.0
        gram = xa.T @ xa
        try:
            w0 = np.linalg.solve(gram, s)
        except np.linalg.LinAlgError:
            w0 = None
        if w0 is None or s @ w0 <= 0.0:
            # the newest variable adds no new direction; retire it for good
            bad = active.pop()
            excluded[bad] = True
            if entered and entered[-1] == bad:
                entered.pop()
            continue
        aa = 1.0 / np.sqrt(s @ w0)
        w = aa * w0
        u = xa @ w
        a = x.T @ u

        gamma = cmax / aa
        mask = np.ones(m_eff, dtype=bool)
        mask[active] = False
        mask &= ~excluded
        if np.any(mask):
            cm, am = c[mask], a[mask]
            with np.errstate(divide="ignore", invalid="ignore"):
                cands = np.concatenate(
                    [(cmax - cm) / (aa - am), (cmax + cm) / (aa + am)]
                )
            cands = cands[np.isfinite(cands) & (cands > _GAMMA_TOL)]
            if cands.size:
                gamma = min(gamma, float(np.min(cands)))

        drop_idx = -1
        with np.errstate(divide="ignore", invalid="ignore"):
            crossings = -coef[active] / w
        valid = np.isfinite(crossings) & (crossings > _GAMMA_TOL)
        if np.any(valid):
            pos = int(np.argmin(np.where(valid, crossings, np.inf)))
            if crossings[pos] < gamma:
                gamma = float(crossings[pos])
                drop_idx = pos

        coef[active] += gamma * w
        if drop_idx >= 0:
            dropped = active.pop(drop_idx)
            coef[dropped] = 0.0
            drop_pending = True

        coef_snapshots.append(coef.copy())
        rss_list.append(float(np.sum((yc - x @ coef) ** 2)))
        corr_list.append(float(np.max(np.abs(x.T @ (yc - x @ coef)))))
        active_snapshots.append(sorted(int(live[i]) for i in active))

        if len(entered) >= max_steps and not drop_pending:
            break
        if len(active) >= df_limit:
            break

    coef_internal = np.vstack(coef_snapshots)
    coef_full = np.zeros((coef_internal.shape[0], m))
    coef_full[:, live] = coef_internal / norms[live]
    return LarsPath(
        entry_order=[int(live[i]) for i in entered],
        coef_path=coef_full,
        rss_path=np.asarray(rss_list),
        corr_path=np.asarray(corr_list),
        active_path=active_snapshots,
        skipped=skipped,
    )


def select_first_p(path: LarsPath, p: int) -> tuple[list[int], bool]:
    """First ``p`` variables to enter the path, with a shortfall flag.

    When fewer than ``p`` variables ever activated, all of them are returned
    and the flag is True.
    """
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    if len(path.entry_order) >= p:
        return list(path.entry_order[:p]), False
    return list(path.entry_order), True


def selection_deviance(z_selected: np.ndarray, y: np.ndarray) -> float:
    """Deviance of a logistic fit on the selected columns.

    Convenience wrapper used to trace the quality of a selected subspace.
    Returns NaN when the fit produced a non-finite deviance.
    """
    from .classify import fit_logistic

    model = fit_logistic(z_selected, y)
    return model.deviance if np.isfinite(model.deviance) else float("nan")
