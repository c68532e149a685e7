"""Tests for the five simulation-study generators."""

import numpy as np
import pytest

from massdr.classify import bayes_rate_estimate
from massdr.errors import ParameterError
from massdr.numerics import RngStream
from massdr.projection import sparsity_of
from massdr.simgen import (
    STUDIES,
    LinkSpec,
    export_csv,
    gen_sim,
    load_csv_pair,
    logistic_labels,
)
from massdr.spline import expand_features


def test_every_study_is_deterministic():
    for study in STUDIES:
        a = gen_sim(study, RngStream(3).child("data").child(0))
        b = gen_sim(study, RngStream(3).child("data").child(0))
        assert np.array_equal(a.x_train, b.x_train), study
        assert np.array_equal(a.y_train, b.y_train), study
        assert np.array_equal(a.x_test, b.x_test), study
        assert np.array_equal(a.y_test, b.y_test), study


def test_default_shapes():
    for study in ("I", "II1", "II2", "III", "IV"):
        ds = gen_sim(study, RngStream(0))
        assert ds.x_train.shape == (100, 50), study
        assert ds.x_test.shape == (1000, 50), study
        assert ds.y_train.shape == (100,) and ds.y_test.shape == (1000,)
    wide = gen_sim("V", RngStream(0))
    assert wide.x_train.shape == (100, 1000)
    assert wide.x_test.shape == (1000, 1000)
    assert wide.truth.z0_train.shape == (100, 5)
    assert wide.truth.z0_test.shape == (1000, 5)


def test_size_overrides_and_validation():
    ds = gen_sim("II1", RngStream(1), n_train=60, n_test=80, d=20)
    assert ds.x_train.shape == (60, 20)
    assert ds.x_test.shape == (80, 20)
    with pytest.raises(ParameterError):
        gen_sim("II1", RngStream(1), n_train=1)
    with pytest.raises(ParameterError):
        gen_sim("nope", RngStream(1))


def test_labels_are_binary_and_mixed():
    for study in STUDIES:
        ds = gen_sim(study, RngStream(7))
        for y in (ds.y_train, ds.y_test):
            assert set(np.unique(y)) <= {0, 1}
        assert 0.2 < ds.y_test.mean() < 0.8, study


def test_nonlinear_study_truth_contract():
    ds = gen_sim("I", RngStream(2), lambda0=5.0, xi0=0.3)
    truth = ds.truth
    assert truth.p0 == 2
    assert truth.theta0 is not None and truth.a0 is None
    assert truth.lambda0 == 5.0 and truth.xi0 == 0.3
    assert truth.link.kind == "logit"
    assert ds.meta["beta_attempts"] >= 1
    # the stored reduced coordinates reproduce from the stored coefficients
    basis = truth.theta0.basis
    feats = expand_features(ds.x_train, basis)
    assert np.allclose(feats @ truth.theta0.theta, truth.z0_train, atol=1e-8)
    # each active coefficient block carries exactly the configured curvature
    grid = np.linspace(*basis.domain, 200)
    b2 = basis.second_derivative(grid)
    for block in truth.theta0.blocks():
        f2 = b2 @ block.T
        curv = np.mean(f2**2, axis=0)
        active = np.any(block != 0.0, axis=1)
        assert np.allclose(curv[active], 5.0, rtol=1e-8)


def test_nonlinear_truth_is_visibly_nonlinear():
    """At the default curvature the truth index is far from linear in x."""
    ds = gen_sim("I", RngStream(11))
    x, z0 = ds.x_test, ds.truth.z0_test
    eta = z0 @ ds.truth.link.beta
    xc = np.column_stack([np.ones(len(x)), x])
    coef, *_ = np.linalg.lstsq(xc, eta, rcond=None)
    resid = eta - xc @ coef
    linear_share = 1.0 - float(resid @ resid / ((eta - eta.mean()) @ (eta - eta.mean())))
    assert linear_share < 0.55


def test_sparse_design_study_truth():
    ds = gen_sim("II1", RngStream(4))
    truth = ds.truth
    assert truth.a0.shape == (50, 5)
    assert abs(sparsity_of(truth.a0) - 0.98) < 1e-12
    # signal sits on the five scaled-up columns
    assert set(np.flatnonzero(np.any(truth.a0 != 0.0, axis=1))) == set(range(5))
    sds = ds.x_train.std(axis=0)
    assert np.all(np.abs(sds[:5] - 10.0) < 0.5 * 10.0)
    assert np.all(np.abs(sds[5:] - 1.0) < 0.5)
    # the scenario-2 variant hides the signal on minor columns instead
    ds2 = gen_sim("II2", RngStream(4))
    active2 = np.flatnonzero(np.any(ds2.truth.a0 != 0.0, axis=1))
    assert len(active2) == 5
    assert np.all(active2 >= 5)


def test_sparse_design_index_is_major_variance_free():
    """Scenario-2 coefficients are centered, so the index decorrelates from
    the shared compound-symmetric factor that dominates the top principal
    component."""
    ds = gen_sim("II2", RngStream(5))
    beta_sum = float(ds.truth.link.beta.sum())
    assert abs(beta_sum) < 1e-10


def test_dense_design_studies():
    ds3 = gen_sim("III", RngStream(6))
    assert ds3.truth.a0.shape == (50, 5)
    assert ds3.truth.link.kind == "sine_logit"
    assert abs(ds3.truth.link.omega - 0.05 * np.pi) < 1e-12
    var = ds3.truth.z0_test.var(axis=0)
    assert np.allclose(var, 100.0, rtol=0.25)
    ds4 = gen_sim("IV", RngStream(6))
    assert abs(ds4.truth.link.omega - 0.005 * np.pi) < 1e-12
    # heavy-tailed marginals: excess kurtosis well above Gaussian
    flat = ds4.x_test[:, 0]
    kurt = np.mean((flat - flat.mean()) ** 4) / np.var(flat) ** 2
    assert kurt > 4.0


def test_wide_study_structure():
    ds = gen_sim("V", RngStream(8))
    truth = ds.truth
    assert truth.a0.shape == (1000, 5)
    active = np.flatnonzero(np.any(truth.a0 != 0.0, axis=1))
    assert np.all(active < 50)
    # informative block is compound symmetric with unit variance, noise is weaker
    v_info = ds.x_test[:, :50].var(axis=0)
    v_noise = ds.x_test[:, 50:].var(axis=0)
    assert abs(v_info.mean() - 1.0) < 0.1
    assert abs(v_noise.mean() - 0.5) < 0.05
    assert np.allclose(truth.z0_test.var(axis=0), 50.0, rtol=0.3)


def test_bayes_rates_match_operating_points():
    targets = {"II1": 0.114, "II2": 0.112, "III": 0.082, "IV": 0.068, "V": 0.082}
    reps = 20
    for study, want in targets.items():
        rates = [
            bayes_rate_estimate(gen_sim(study, RngStream(0).child("data").child(r)))
            for r in range(reps)
        ]
        got = float(np.mean(rates))
        assert abs(got - want) < 0.015, f"{study}: {got:.4f} vs {want}"


def test_nonlinear_bayes_rate_within_accept_window():
    for r in range(5):
        ds = gen_sim("I", RngStream(1).child("data").child(r))
        rate = bayes_rate_estimate(ds)
        assert 0.03 < rate < 0.27


def test_link_probabilities():
    logit = LinkSpec(kind="logit", beta=np.array([1.0, -1.0]))
    assert np.allclose(logit.probability(np.zeros((3, 2))), 0.5)
    sine = LinkSpec(kind="sine_logit", beta=np.array([2.0]), omega=0.1)
    assert np.allclose(sine.probability(np.zeros((4, 1))), 0.5)
    big = LinkSpec(kind="logit", beta=np.array([50.0]))
    p = big.probability(np.array([[1.0], [-1.0]]))
    assert p[0] > 0.999 and p[1] < 0.001
    with pytest.raises(ParameterError):
        LinkSpec(kind="probit", beta=np.array([1.0]))
    with pytest.raises(ParameterError):
        LinkSpec(kind="sine_logit", beta=np.array([1.0]))


def test_label_sampler_is_calibrated():
    spec = LinkSpec(kind="logit", beta=np.array([0.0]))
    y = logistic_labels(np.zeros((100_000, 1)), spec, RngStream(9))
    assert abs(y.mean() - 0.5) < 0.01


def test_csv_round_trip(tmp_path):
    ds = gen_sim("II1", RngStream(10), n_train=12, n_test=9, d=12)
    paths = export_csv(ds, tmp_path, stem="s_")
    assert [p.name for p in paths] == ["s_train.csv", "s_test.csv"]
    back = load_csv_pair(paths[0], paths[1])
    assert np.array_equal(back.x_train, ds.x_train)
    assert np.array_equal(back.y_train, ds.y_train)
    assert np.array_equal(back.x_test, ds.x_test)
    assert np.array_equal(back.y_test, ds.y_test)
    assert back.truth is None


def test_csv_pair_validates_columns(tmp_path):
    a = gen_sim("II1", RngStream(11), n_train=8, n_test=8, d=12)
    b = gen_sim("II1", RngStream(11), n_train=8, n_test=8, d=13)
    pa = export_csv(a, tmp_path, stem="a_")
    pb = export_csv(b, tmp_path, stem="b_")
    with pytest.raises(ParameterError):
        load_csv_pair(pa[0], pb[1])
