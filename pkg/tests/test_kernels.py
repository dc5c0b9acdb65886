"""Jitted kernels against their pure-numpy fallbacks and small closed forms."""

import numpy as np
import pytest

from robustsv import kernels


@pytest.fixture
def both_paths():
    """Run a callable under each kernel path, restoring the default after."""
    def run(fn):
        try:
            kernels.set_numba(False)
            ref = fn()
            kernels.set_numba(True)
            jit = fn()
        finally:
            kernels.set_numba(True)
        return ref, jit
    return run


def test_set_numba_respects_availability():
    kernels.set_numba(True)
    assert kernels.numba_enabled() == kernels.have_numba()
    kernels.set_numba(False)
    assert not kernels.numba_enabled()
    kernels.set_numba(True)


def test_image_source_paths_agree(both_paths):
    dims = np.array([4.2, 3.1, 2.6])
    beta = np.array([0.8, 0.7, 0.75, 0.6, 0.5, 0.65])
    src = np.array([1.0, 1.2, 1.3])
    mic = np.array([3.0, 2.0, 1.1])
    ref, jit = both_paths(
        lambda: kernels.image_source_taps(dims, beta, src, mic, 8, 8000.0, 343.0, 2000))
    assert np.allclose(ref, jit, rtol=0, atol=1e-12)
    assert np.sum(np.abs(ref)) > 0


def test_image_source_direct_path_tap():
    # free field: only the n=0, p=0 image survives max_order=0
    dims = np.array([10.0, 10.0, 10.0])
    beta = np.zeros(6)
    src = np.array([2.0, 2.0, 2.0])
    mic = np.array([5.0, 6.0, 2.0])
    d = 5.0
    h = kernels.image_source_taps(dims, beta, src, mic, 0, 8000.0, 343.0, 1500)
    tap = int(round(d / 343.0 * 8000.0))
    assert h[tap] == pytest.approx(1.0 / (4.0 * np.pi * d), rel=1e-12)
    assert np.count_nonzero(h) == 1


def test_overlap_add_paths_agree(both_paths):
    rng = np.random.default_rng(1)
    frames = rng.standard_normal((40, 200))
    window = np.hamming(200)
    (ref_out, ref_norm), (jit_out, jit_norm) = both_paths(
        lambda: kernels.overlap_add(frames, 80, window))
    assert np.allclose(ref_out, jit_out, atol=1e-12)
    assert np.allclose(ref_norm, jit_norm, atol=1e-12)


def test_overlap_add_constant_window_counts_overlaps():
    # unit window, unit frames: output counts how many frames cover each sample
    frames = np.ones((3, 4))
    out, norm = kernels.overlap_add(frames, 2, np.ones(4))
    assert np.array_equal(out, [1, 1, 2, 2, 2, 2, 1, 1])
    assert np.array_equal(norm, out)


def test_gmm_logprob_paths_agree(both_paths):
    rng = np.random.default_rng(2)
    x = rng.standard_normal((300, 12))
    means = rng.standard_normal((8, 12))
    variances = rng.uniform(0.5, 2.0, (8, 12))
    log_consts = rng.standard_normal(8)
    ref, jit = both_paths(lambda: kernels.gmm_logprob(x, means, 1.0 / variances, log_consts))
    assert np.allclose(ref, jit, rtol=1e-12, atol=1e-10)


def test_gmm_logprob_matches_scipy_normal():
    from scipy.stats import norm
    rng = np.random.default_rng(3)
    x = rng.standard_normal((50, 3))
    means = rng.standard_normal((4, 3))
    variances = rng.uniform(0.5, 2.0, (4, 3))
    weights = np.full(4, 0.25)
    log_consts = (np.log(weights) - 0.5 * x.shape[1] * np.log(2 * np.pi)
                  - 0.5 * np.sum(np.log(variances), axis=1))
    got = kernels.gmm_logprob(x, means, 1.0 / variances, log_consts)
    want = np.stack([
        np.log(weights[c]) + np.sum(norm.logpdf(x, means[c], np.sqrt(variances[c])), axis=1)
        for c in range(4)
    ], axis=1)
    assert np.allclose(got, want, atol=1e-10)


def test_sliding_moments_paths_agree(both_paths):
    rng = np.random.default_rng(4)
    x = rng.standard_normal((400, 7))
    ref, jit = both_paths(lambda: kernels.sliding_moments(x, 150))
    assert np.allclose(ref[0], jit[0], atol=1e-9)
    assert np.allclose(ref[1], jit[1], atol=1e-9)


def test_sliding_moments_brute_force():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((37, 2))
    half = 5
    means, variances = kernels.sliding_moments(x, half)
    for t in range(37):
        seg = x[max(0, t - half):min(37, t + half + 1)]
        assert means[t] == pytest.approx(np.mean(seg, axis=0), abs=1e-10)
        assert variances[t] == pytest.approx(np.var(seg, axis=0), abs=1e-10)


def test_sliding_moments_window_wider_than_signal_is_global():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((9, 3))
    means, variances = kernels.sliding_moments(x, 100)
    assert np.allclose(means, np.mean(x, axis=0)[None, :])
    assert np.allclose(variances, np.var(x, axis=0)[None, :])
