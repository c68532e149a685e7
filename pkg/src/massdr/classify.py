"""Logistic regression via iteratively reweighted least squares.

The final classifier of every pipeline.  Fitting is plain Newton/IRLS with
step halving and a tiny ridge term on the normal equations only, so the
reported deviance is always that of an unpenalized logistic model evaluated
at the returned coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError

_RIDGE = 1e-8
_REL_TOL = 1e-10
_MAX_ITER = 100
_MAX_HALVINGS = 40


@dataclass(frozen=True)
class LogisticModel:
    """Fitted logistic regression; ``coef[0]`` is the intercept."""

    coef: np.ndarray
    converged: bool
    deviance: float
    n_iter: int


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * eta))


def _deviance(eta: np.ndarray, y: np.ndarray) -> float:
    # -2 log-likelihood, computed stably as 2 * sum(log(1 + e^eta) - y * eta)
    return float(2.0 * np.sum(np.logaddexp(0.0, eta) - y * eta))


def _check_xy(z: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=float)
    y = np.asarray(y)
    if z.ndim != 2:
        raise ShapeError(f"z must be 2-d, got shape {z.shape}")
    if y.ndim != 1 or y.shape[0] != z.shape[0]:
        raise ShapeError(f"y must be 1-d with {z.shape[0]} entries, got {y.shape}")
    if not np.all(np.isfinite(z)):
        raise ParameterError("z contains non-finite entries")
    yf = y.astype(float)
    if not np.all((yf == 0.0) | (yf == 1.0)):
        raise ParameterError("labels must be binary 0/1")
    return z, yf


def fit_logistic(z: np.ndarray, y: np.ndarray) -> LogisticModel:
    """Fit an intercept-plus-slopes logistic model by damped IRLS.

    Convergence is declared when the relative deviance change drops below
    1e-10; after 100 iterations the best iterate found is returned with
    ``converged=False``.  A 1e-8 ridge on the normal equations keeps the
    Newton step defined for collinear or separable inputs without changing
    the reported deviance.
    """
    z, yf = _check_xy(z, y)
    n = z.shape[0]
    x = np.column_stack([np.ones(n), z])
    beta = np.zeros(x.shape[1])
    eta = x @ beta
    dev = _deviance(eta, yf)
    converged = False
    it = 0
    for it in range(1, _MAX_ITER + 1):
        p = _sigmoid(eta)
        grad = x.T @ (yf - p)
        w = p * (1.0 - p)
        hess = x.T @ (w[:, None] * x)
        hess[np.diag_indices_from(hess)] += _RIDGE
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        new_dev = dev
        for _ in range(_MAX_HALVINGS):
            cand = beta + t * step
            cand_eta = x @ cand
            cand_dev = _deviance(cand_eta, yf)
            if cand_dev <= dev:
                beta, eta, new_dev = cand, cand_eta, cand_dev
                break
            t *= 0.5
        else:
            converged = True  # no descent direction left; treat as stalled optimum
            break
        rel = abs(dev - new_dev) / max(abs(dev), 1e-300)
        dev = new_dev
        if rel < _REL_TOL:
            converged = True
            break
    return LogisticModel(coef=beta, converged=converged, deviance=dev, n_iter=it)


def predict_proba(model: LogisticModel, z: np.ndarray) -> np.ndarray:
    """Class-1 probabilities for new rows."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or z.shape[1] != model.coef.shape[0] - 1:
        raise ShapeError(
            f"z must have {model.coef.shape[0] - 1} columns, got shape {z.shape}"
        )
    return _sigmoid(model.coef[0] + z @ model.coef[1:])


def predict_classes(model: LogisticModel, z: np.ndarray) -> np.ndarray:
    """Hard labels at the 0.5 threshold; a probability of exactly 0.5 maps to 1."""
    return (predict_proba(model, z) >= 0.5).astype(int)


def mcr(predicted: np.ndarray, truth: np.ndarray) -> float:
    """Misclassification rate between two equal-length binary label vectors."""
    predicted = np.asarray(predicted).ravel()
    truth = np.asarray(truth).ravel()
    if predicted.size == 0:
        raise ParameterError("cannot compute a rate on empty label vectors")
    if predicted.shape != truth.shape:
        raise ShapeError(
            f"label vectors differ in length: {predicted.shape} vs {truth.shape}"
        )
    return float(np.mean(predicted != truth))


def bayes_rate_estimate(dataset) -> float:
    """Misclassification rate of the true-probability rule on the test split.

    Uses the data-generating truth carried by a simulated dataset: classify
    each test point by thresholding the generating probability at 0.5 and
    score against the realized labels.  This estimates the best achievable
    error rate for the study.
    """
    truth = getattr(dataset, "truth", None)
    if truth is None:
        raise ParameterError("dataset carries no generating truth")
    p = truth.link.probability(truth.z0_test)
    pred = (p >= 0.5).astype(int)
    return mcr(pred, dataset.y_test)
