"""Tests for the preliminary dimension reductions used on very wide data."""

import numpy as np
import pytest

from massdr.errors import ParameterError, ShapeError
from massdr.reduce import (
    fingerprint,
    intermediate_dim,
    no_reduction,
    pca_reduce,
    pca_sis_reduce,
    sis_reduce,
)


def test_intermediate_dim_known_values():
    # round(2n / ln n) computed by hand
    assert intermediate_dim(100) == 43
    assert intermediate_dim(150) == 60
    assert intermediate_dim(1000) == 290
    assert intermediate_dim(8) == 8
    with pytest.raises(ParameterError):
        intermediate_dim(7)


def test_fingerprint_flags_any_change():
    x = np.arange(12.0).reshape(3, 4)
    fp = fingerprint(x)
    assert fp == fingerprint(x.copy())
    y = x.copy()
    y[1, 2] += 1e-12
    assert fp != fingerprint(y)
    assert fp != fingerprint(x.reshape(4, 3))
    assert len(fp) == 16


def test_pca_matches_direct_svd():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((40, 6)) * np.array([5.0, 3.0, 2.0, 1.0, 0.5, 0.1])
    red = pca_reduce(x, 3)
    scores = red.apply(x)
    assert scores.shape == (40, 3)
    xc = x - x.mean(axis=0)
    u, s, vt = np.linalg.svd(xc, full_matrices=False)
    want = xc @ vt.T[:, :3]
    # same subspace up to per-component sign
    for k in range(3):
        assert np.allclose(np.abs(scores[:, k]), np.abs(want[:, k]), atol=1e-8)
    # score variances follow the singular values
    assert np.allclose(np.var(scores, axis=0), s[:3] ** 2 / 40, rtol=1e-10)


def test_pca_apply_reuses_training_center():
    rng = np.random.default_rng(1)
    train = rng.standard_normal((30, 4)) + 10.0
    test = rng.standard_normal((10, 4))
    red = pca_reduce(train, 2)
    out = red.apply(test)
    assert np.allclose(out, (test - train.mean(axis=0)) @ red.loadings)


def test_pca_rank_deficiency_is_reported():
    rng = np.random.default_rng(2)
    base = rng.standard_normal((20, 2))
    x = np.column_stack([base, base @ np.array([[1.0, 2.0], [3.0, 4.0]])])
    red = pca_reduce(x, 4)
    assert red.rank_deficient
    assert red.m == 2
    with pytest.raises(ParameterError):
        pca_reduce(np.ones((5, 3)), 2)


def test_sis_keeps_most_correlated_columns():
    rng = np.random.default_rng(3)
    n = 200
    y = rng.integers(0, 2, n).astype(float)
    x = rng.standard_normal((n, 10))
    x[:, 4] += 3.0 * y
    x[:, 7] -= 2.0 * y
    red = sis_reduce(x, y, 2)
    assert red.indices.tolist() == [4, 7]
    assert np.array_equal(red.apply(x), x[:, [4, 7]])


def test_sis_order_matches_marginal_correlations():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((80, 12))
    y = rng.integers(0, 2, 80).astype(float)
    red = sis_reduce(x, y, 5)
    corr = np.array([abs(np.corrcoef(x[:, j], y)[0, 1]) for j in range(12)])
    want = np.sort(np.argsort(-corr)[:5])
    assert np.array_equal(red.indices, want)


def test_sis_validates_m():
    x = np.random.default_rng(0).standard_normal((10, 3))
    y = np.arange(10) % 2
    with pytest.raises(ParameterError):
        sis_reduce(x, y, 0)
    with pytest.raises(ParameterError):
        sis_reduce(x, y, 4)
    with pytest.raises(ShapeError):
        sis_reduce(x, y[:-1], 2)


def test_pca_sis_finds_low_variance_informative_component():
    """A weak-variance direction that drives y must beat the big noise axes."""
    rng = np.random.default_rng(5)
    n = 300
    signal = rng.standard_normal(n)
    noise = rng.standard_normal((n, 5)) * np.array([20.0, 15.0, 10.0, 8.0, 6.0])
    x = np.column_stack([noise, 0.5 * signal])
    y = (signal > 0.0).astype(float)
    plain = pca_reduce(x, 1)
    screened = pca_sis_reduce(x, y, 1)
    top_corr = abs(np.corrcoef(plain.apply(x)[:, 0], y)[0, 1])
    best_corr = abs(np.corrcoef(screened.apply(x)[:, 0], y)[0, 1])
    assert best_corr > 0.6
    assert best_corr > top_corr + 0.3


def test_pca_sis_scores_are_pc_scores():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((50, 6))
    y = rng.integers(0, 2, 50).astype(float)
    red = pca_sis_reduce(x, y, 3)
    xc = x - x.mean(axis=0)
    u, s, vt = np.linalg.svd(xc, full_matrices=False)
    all_scores = xc @ vt.T
    assert np.allclose(red.apply(x), all_scores[:, red.indices], atol=1e-8)


def test_apply_rejects_mismatched_width():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((20, 5))
    y = rng.integers(0, 2, 20).astype(float)
    with pytest.raises(ShapeError):
        pca_reduce(x, 2).apply(x[:, :4])
    with pytest.raises(ShapeError):
        sis_reduce(x, y, 4).apply(x[:, :2])


def test_no_reduction_is_identity():
    x = np.random.default_rng(8).standard_normal((9, 4))
    red = no_reduction(x)
    assert red.kind == "none"
    assert red.m == 4
    assert np.array_equal(red.apply(x), x)
    assert red.fitted_on == fingerprint(x)
