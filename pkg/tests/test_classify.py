"""Tests for the IRLS logistic classifier."""

import numpy as np
import pytest
from scipy.optimize import minimize

from massdr.classify import (
    bayes_rate_estimate,
    fit_logistic,
    mcr,
    predict_classes,
    predict_proba,
)
from massdr.errors import ParameterError, ShapeError
from massdr.numerics import RngStream
from massdr.simgen import gen_sim


def logistic_data(seed, n=400, d=3, scale=1.5):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, d))
    beta = scale * rng.uniform(-1.0, 1.0, d)
    eta = 0.3 + z @ beta
    y = (rng.random(n) < 1.0 / (1.0 + np.exp(-eta))).astype(int)
    return z, y, beta


def dev_objective(z, y):
    x = np.column_stack([np.ones(len(y)), z])

    def f(b):
        eta = x @ b
        return 2.0 * np.sum(np.logaddexp(0.0, eta) - y * eta)

    return f


def test_fit_matches_direct_optimizer():
    """IRLS lands on the same optimum as a general-purpose minimizer."""
    for seed in range(3):
        z, y, _ = logistic_data(seed)
        model = fit_logistic(z, y)
        assert model.converged
        f = dev_objective(z, y)
        ref = minimize(f, np.zeros(z.shape[1] + 1), method="BFGS", tol=1e-12)
        assert model.deviance <= ref.fun + 1e-6
        assert np.allclose(model.coef, ref.x, atol=1e-4)


def test_deviance_never_exceeds_null_model():
    z, y, _ = logistic_data(4)
    model = fit_logistic(z, y)
    pbar = y.mean()
    null_dev = -2.0 * (np.sum(y) * np.log(pbar) + np.sum(1 - y) * np.log(1 - pbar))
    assert model.deviance <= null_dev


def test_deviance_matches_definition_at_fit():
    z, y, _ = logistic_data(5, n=120)
    model = fit_logistic(z, y)
    p = predict_proba(model, z)
    ll = np.sum(y * np.log(p) + (1 - y) * np.log(1 - p))
    assert abs(model.deviance + 2.0 * ll) < 1e-8


def test_separable_data_is_handled():
    rng = np.random.default_rng(1)
    z = rng.standard_normal((80, 2))
    y = (z[:, 0] > 0.0).astype(int)
    model = fit_logistic(z, y)
    assert np.all(np.isfinite(model.coef))
    assert model.deviance < 1.0
    assert mcr(predict_classes(model, z), y) == 0.0


def test_collinear_columns_do_not_break_fit():
    z, y, _ = logistic_data(2, n=100, d=2)
    zz = np.column_stack([z, z[:, 0]])
    model = fit_logistic(zz, y)
    assert np.all(np.isfinite(model.coef))
    base = fit_logistic(z, y)
    assert model.deviance <= base.deviance + 1e-6


def test_probability_shapes_and_threshold():
    z, y, _ = logistic_data(3, n=50)
    model = fit_logistic(z, y)
    p = predict_proba(model, z)
    assert p.shape == (50,)
    assert np.all((p > 0.0) & (p < 1.0))
    cls = predict_classes(model, z)
    assert np.array_equal(cls, (p >= 0.5).astype(int))
    with pytest.raises(ShapeError):
        predict_proba(model, z[:, :2])


def test_intercept_only_balance():
    # with no informative columns the intercept reproduces the base rate
    y = np.array([0, 0, 0, 1])
    model = fit_logistic(np.zeros((4, 1)), y)
    p = predict_proba(model, np.zeros((1, 1)))[0]
    assert abs(p - 0.25) < 1e-6


def test_label_validation():
    z = np.zeros((4, 1))
    with pytest.raises(ParameterError):
        fit_logistic(z, np.array([0, 1, 2, 0]))
    with pytest.raises(ShapeError):
        fit_logistic(z, np.array([0, 1]))
    with pytest.raises(ParameterError):
        fit_logistic(np.array([[np.inf], [0.0]]), np.array([0, 1]))


def test_mcr_definition_and_errors():
    assert mcr(np.array([0, 1, 1, 0]), np.array([0, 1, 0, 0])) == 0.25
    assert mcr(np.array([1]), np.array([1])) == 0.0
    with pytest.raises(ParameterError):
        mcr(np.array([]), np.array([]))
    with pytest.raises(ShapeError):
        mcr(np.array([0, 1]), np.array([0, 1, 1]))


def test_bayes_rate_uses_generating_truth():
    ds = gen_sim("II1", RngStream(0).child("data").child(0))
    rate = bayes_rate_estimate(ds)
    assert 0.0 < rate < 0.5
    with pytest.raises(ParameterError):
        bayes_rate_estimate(object())
