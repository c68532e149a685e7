"""Tests for the shared numerical utilities: seeding, validation, sampling."""

import numpy as np
import pytest

from massdr.errors import NumericalError, ParameterError, ShapeError
from massdr.numerics import (
    RngStream,
    sample_gh,
    sample_mvnormal,
    svd,
    validate_data_matrix,
)


def test_stream_same_path_same_draws():
    a = RngStream(42).child("data").child(3).generator().standard_normal(16)
    b = RngStream(42).child("data").child(3).generator().standard_normal(16)
    assert np.array_equal(a, b)


def test_stream_sibling_paths_differ():
    base = RngStream(42)
    a = base.child("data").child(0).generator().standard_normal(64)
    b = base.child("data").child(1).generator().standard_normal(64)
    c = base.child("beta").child(0).generator().standard_normal(64)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(b, c)


def test_stream_int_and_str_labels_are_distinct():
    base = RngStream(7)
    a = base.child(1).generator().standard_normal(32)
    b = base.child("1").generator().standard_normal(32)
    assert not np.array_equal(a, b)


def test_stream_child_does_not_disturb_parent():
    base = RngStream(9)
    before = base.generator().standard_normal(8)
    base.child("side")  # deriving a child must not mutate the parent stream
    after = base.generator().standard_normal(8)
    assert np.array_equal(before, after)


def test_derive_seed_stable_and_nonnegative():
    s1 = RngStream(5).child("rep").child(2).derive_seed()
    s2 = RngStream(5).child("rep").child(2).derive_seed()
    assert s1 == s2
    assert isinstance(s1, int)
    assert 0 <= s1 < 2**63
    assert s1 != RngStream(5).child("rep").child(3).derive_seed()


def test_derived_seed_usable_as_stream_seed():
    seed = RngStream(0).child(0).child("mass").derive_seed()
    draws = RngStream(seed).generator().standard_normal(4)
    assert np.all(np.isfinite(draws))


def test_stream_rejects_bad_seeds():
    with pytest.raises(ParameterError):
        RngStream(-1)
    with pytest.raises(ParameterError):
        RngStream(1.5)
    with pytest.raises(ParameterError):
        RngStream(True)


def test_validate_data_matrix_coerces_lists():
    out = validate_data_matrix([[1, 2], [3, 4]])
    assert out.dtype == np.float64
    assert out.shape == (2, 2)


def test_validate_data_matrix_rejects_bad_input():
    with pytest.raises(ShapeError):
        validate_data_matrix(np.zeros(5))
    with pytest.raises(ShapeError):
        validate_data_matrix(np.zeros((0, 3)))
    with pytest.raises(ParameterError):
        validate_data_matrix([[1.0, np.nan], [0.0, 1.0]])


def test_svd_reconstructs_and_orders():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((12, 5))
    u, s, v = svd(m)
    assert np.allclose(u @ np.diag(s) @ v.T, m, atol=1e-10)
    assert np.all(np.diff(s) <= 1e-12)
    assert u.shape == (12, 5) and v.shape == (5, 5)


def test_svd_rejects_nonfinite():
    with pytest.raises((ParameterError, NumericalError)):
        svd(np.array([[1.0, np.inf], [0.0, 1.0]]))


def test_mvnormal_matches_target_moments():
    n, d, var, corr = 200_000, 4, 2.5, 0.5
    x = sample_mvnormal(n, d, var, corr, RngStream(11))
    assert x.shape == (n, d)
    assert np.allclose(x.var(axis=0), var, rtol=0.03)
    c = np.corrcoef(x.T)
    off = c[~np.eye(d, dtype=bool)]
    assert np.allclose(off, corr, atol=0.02)


def test_mvnormal_is_deterministic():
    a = sample_mvnormal(50, 3, 1.0, 0.5, RngStream(3).child("x"))
    b = sample_mvnormal(50, 3, 1.0, 0.5, RngStream(3).child("x"))
    assert np.array_equal(a, b)


def test_mvnormal_rejects_bad_args():
    rng = RngStream(0)
    with pytest.raises(ParameterError):
        sample_mvnormal(10, 3, 0.0, 0.5, rng)
    with pytest.raises(ParameterError):
        sample_mvnormal(10, 3, 1.0, 1.0, rng)
    with pytest.raises(ParameterError):
        sample_mvnormal(10, 3, 1.0, -0.1, rng)
    with pytest.raises(ParameterError):
        sample_mvnormal(0, 3, 1.0, 0.5, rng)


def test_gh_identity_case_equals_normal_draws():
    """With g = h = 0 the marginal transform is the identity."""
    a = sample_gh(40, 6, 0.0, 0.0, 0.5, RngStream(8))
    b = sample_mvnormal(40, 6, 1.0, 0.5, RngStream(8))
    assert np.array_equal(a, b)


def test_gh_transform_matches_formula():
    g, h = 0.5, 0.2
    z = sample_mvnormal(500, 2, 1.0, 0.3, RngStream(21))
    want = ((np.exp(g * z) - 1.0) / g) * np.exp(h * z * z / 2.0)
    got = sample_gh(500, 2, g, h, 0.3, RngStream(21))
    assert np.allclose(got, want, rtol=1e-12)


def test_gh_positive_g_skews_right():
    x = sample_gh(100_000, 1, 0.5, 0.0, 0.5, RngStream(13)).ravel()
    centered = x - x.mean()
    skew = np.mean(centered**3) / np.mean(centered**2) ** 1.5
    assert skew > 0.5


def test_gh_clamp_reported_in_meta():
    meta = {}
    x = sample_gh(20_000, 1, 0.0, 6.0, 0.5, RngStream(2), meta=meta)
    assert np.max(np.abs(x)) <= 1e12
    assert meta["gh_clamped"] >= 1


def test_gh_rejects_negative_h():
    with pytest.raises(ParameterError):
        sample_gh(10, 2, 0.0, -0.5, 0.5, RngStream(0))
