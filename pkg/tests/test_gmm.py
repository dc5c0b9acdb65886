"""Diagonal GMM training and Baum-Welch statistics."""

import numpy as np
import pytest

from robustsv.backend.gmm import (
    BwStats,
    GmmModel,
    bw_stats,
    load_gmm,
    save_gmm,
    train_ubm,
    weighted_log_densities,
)


def _two_cluster_data(n=2000, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(loc=(-2.0, 0.0), scale=(0.5, 0.8), size=(n // 2, 2))
    b = rng.normal(loc=(2.0, 1.0), scale=(0.7, 0.4), size=(n // 2, 2))
    return np.concatenate([a, b])


def test_model_validation():
    with pytest.raises(ValueError):
        GmmModel(np.array([0.6, 0.6]), np.zeros((2, 1)), np.ones((2, 1)))
    with pytest.raises(ValueError):
        GmmModel(np.array([1.0]), np.zeros((1, 1)), np.zeros((1, 1)))


def test_single_component_closed_form():
    # C=1, one EM pass: the fit is exactly the sample mean and variance
    rng = np.random.default_rng(1)
    x = rng.normal(3.0, 2.0, size=(500, 3))
    model = train_ubm(x, 1, iters=1, seed=2)
    assert model.means[0] == pytest.approx(x.mean(axis=0), abs=1e-10)
    assert model.variances[0] == pytest.approx(x.var(axis=0), abs=1e-10)
    assert model.weights[0] == pytest.approx(1.0)


def test_two_components_recover_clusters():
    x = _two_cluster_data()
    model = train_ubm(x, 2, iters=20, seed=3)
    means = model.means[np.argsort(model.means[:, 0])]
    assert means[0] == pytest.approx([-2.0, 0.0], abs=0.2)
    assert means[1] == pytest.approx([2.0, 1.0], abs=0.2)
    assert model.weights == pytest.approx([0.5, 0.5], abs=0.05)


def test_loglik_trace_non_decreasing():
    x = _two_cluster_data(seed=4)
    model = train_ubm(x, 8, iters=20, seed=5)
    trace = np.array(model.loglik_trace)
    assert len(trace) == 20
    rel = np.diff(trace) / np.abs(trace[:-1])
    assert np.all(rel >= -1e-10)


def test_training_deterministic():
    x = _two_cluster_data(seed=6)
    a = train_ubm(x, 4, iters=5, seed=7)
    b = train_ubm(x, 4, iters=5, seed=7)
    assert np.array_equal(a.means, b.means)
    assert a.loglik_trace == b.loglik_trace


def test_variance_floor_holds_on_degenerate_dim():
    rng = np.random.default_rng(8)
    x = np.column_stack([rng.standard_normal(300), np.full(300, 5.0)])
    x[:150, 1] += 1e-9  # nearly constant second dim
    model = train_ubm(x, 2, iters=5, seed=9)
    assert np.all(model.variances > 0)


def test_train_rejects_bad_inputs():
    with pytest.raises(ValueError):
        train_ubm(np.zeros((0, 2)), 2)
    with pytest.raises(ValueError):
        train_ubm(np.zeros((3, 2)), 8)


def test_weighted_log_densities_normalization():
    # exp of the weighted log densities summed over components integrates
    # the mixture; at any point the responsibilities must sum to one
    x = _two_cluster_data(n=200, seed=10)
    model = train_ubm(x, 4, iters=3, seed=11)
    logp = weighted_log_densities(x, model)
    resp = np.exp(logp - logp.max(axis=1, keepdims=True))
    resp /= resp.sum(axis=1, keepdims=True)
    assert resp.shape == (200, 4)
    assert np.allclose(resp.sum(axis=1), 1.0)


def test_bw_stats_brute_force_oracle():
    x = _two_cluster_data(n=60, seed=12)
    model = train_ubm(x, 3, iters=3, seed=13)
    stats = bw_stats(x, model)
    # reference: responsibilities from scratch via scipy normals
    from scipy.stats import norm
    like = np.stack([
        model.weights[c]
        * np.prod(norm.pdf(x, model.means[c], np.sqrt(model.variances[c])), axis=1)
        for c in range(3)
    ], axis=1)
    resp = like / like.sum(axis=1, keepdims=True)
    n_ref = resp.sum(axis=0)
    f_ref = resp.T @ x - n_ref[:, None] * model.means
    assert stats.n == pytest.approx(n_ref, rel=1e-9)
    assert np.allclose(stats.f, f_ref, atol=1e-8)
    assert stats.n.sum() == pytest.approx(60.0)


def test_bw_stats_empty_frames_are_zero():
    model = train_ubm(_two_cluster_data(n=100, seed=14), 2, iters=2, seed=15)
    stats = bw_stats(np.zeros((0, 2)), model)
    assert np.array_equal(stats.n, np.zeros(2))
    assert np.array_equal(stats.f, np.zeros((2, 2)))


def test_bw_stats_frame_at_component_mean_centers_f():
    # a single frame exactly at one component's mean contributes zero
    # first-order stat to that component (f is mean-centered)
    model = GmmModel(np.array([0.5, 0.5]),
                     np.array([[0.0, 0.0], [10.0, 10.0]]),
                     np.ones((2, 2)))
    stats = bw_stats(np.array([[0.0, 0.0]]), model)
    assert stats.n[0] > 0.99  # nearly all responsibility on component 0
    assert stats.f[0] == pytest.approx([0.0, 0.0], abs=1e-6)


def test_save_load_roundtrip(tmp_path):
    model = train_ubm(_two_cluster_data(n=100, seed=16), 2, iters=3, seed=17)
    path = tmp_path / "ubm.rsv"
    save_gmm(path, model)
    back = load_gmm(path)
    assert np.array_equal(back.means, model.means)
    assert np.array_equal(back.variances, model.variances)
    assert np.array_equal(back.weights, model.weights)
    assert back.loglik_trace == pytest.approx(model.loglik_trace)
