"""Hot numeric kernels, each with a numba-jitted and a pure-numpy implementation.

The jitted path is used by default when numba imports cleanly. Set the
environment variable ``ROBUSTSV_NUMBA=0`` before import to force the numpy
fallbacks (useful on platforms where numba is unavailable, and for the
benchmark in ``benchmarks/bench_kernels.py``). Both paths compute the same
quantities; results agree to floating-point reordering tolerance.
"""

from __future__ import annotations

import os

import numpy as np


def _env_wants_numba() -> bool:
    value = os.environ.get("ROBUSTSV_NUMBA", "1").strip().lower()
    return value not in ("0", "false", "off", "no")


try:
    if _env_wants_numba():
        from numba import njit

        _HAVE_NUMBA = True
    else:
        _HAVE_NUMBA = False
except ImportError:  # pragma: no cover - exercised only without numba installed
    _HAVE_NUMBA = False

_use_numba = _HAVE_NUMBA


def have_numba() -> bool:
    """True when numba imported cleanly and the env flag allows it."""
    return _HAVE_NUMBA


def numba_enabled() -> bool:
    """True when the jitted kernel path is active."""
    return _use_numba


def set_numba(flag: bool) -> None:
    """Switch the active kernel path at runtime (no-op enable without numba)."""
    global _use_numba
    _use_numba = bool(flag) and _HAVE_NUMBA


# ---------------------------------------------------------------------------
# image-source room impulse response accumulation
# ---------------------------------------------------------------------------

def _image_source_taps_py(dims, beta, src, mic, max_order, fs, c, n_len):
    h = np.zeros(n_len)
    n_max = max_order // 2 + 1
    for nx in range(-n_max, n_max + 1):
        for ny in range(-n_max, n_max + 1):
            for nz in range(-n_max, n_max + 1):
                for px in range(2):
                    for py in range(2):
                        for pz in range(2):
                            order = (
                                abs(nx - px) + abs(nx)
                                + abs(ny - py) + abs(ny)
                                + abs(nz - pz) + abs(nz)
                            )
                            if order > max_order:
                                continue
                            ix = (1.0 - 2.0 * px) * src[0] + 2.0 * nx * dims[0]
                            iy = (1.0 - 2.0 * py) * src[1] + 2.0 * ny * dims[1]
                            iz = (1.0 - 2.0 * pz) * src[2] + 2.0 * nz * dims[2]
                            dx = ix - mic[0]
                            dy = iy - mic[1]
                            dz = iz - mic[2]
                            d = np.sqrt(dx * dx + dy * dy + dz * dz)
                            amp = (
                                beta[0] ** abs(nx - px) * beta[1] ** abs(nx)
                                * beta[2] ** abs(ny - py) * beta[3] ** abs(ny)
                                * beta[4] ** abs(nz - pz) * beta[5] ** abs(nz)
                            )
                            if amp == 0.0:
                                continue
                            delay = int(np.round(d / c * fs))
                            if delay < n_len:
                                h[delay] += amp / (4.0 * np.pi * d)
    return h


def _image_source_taps_np(dims, beta, src, mic, max_order, fs, c, n_len):
    n_max = max_order // 2 + 1
    n = np.arange(-n_max, n_max + 1)
    p = np.arange(2)
    nx, ny, nz, px, py, pz = (g.ravel() for g in np.meshgrid(n, n, n, p, p, p, indexing="ij"))
    order = (
        np.abs(nx - px) + np.abs(nx)
        + np.abs(ny - py) + np.abs(ny)
        + np.abs(nz - pz) + np.abs(nz)
    )
    keep = order <= max_order
    nx, ny, nz, px, py, pz = nx[keep], ny[keep], nz[keep], px[keep], py[keep], pz[keep]
    ix = (1.0 - 2.0 * px) * src[0] + 2.0 * nx * dims[0]
    iy = (1.0 - 2.0 * py) * src[1] + 2.0 * ny * dims[1]
    iz = (1.0 - 2.0 * pz) * src[2] + 2.0 * nz * dims[2]
    d = np.sqrt((ix - mic[0]) ** 2 + (iy - mic[1]) ** 2 + (iz - mic[2]) ** 2)
    amp = (
        beta[0] ** np.abs(nx - px) * beta[1] ** np.abs(nx)
        * beta[2] ** np.abs(ny - py) * beta[3] ** np.abs(ny)
        * beta[4] ** np.abs(nz - pz) * beta[5] ** np.abs(nz)
    )
    nonzero = amp != 0.0
    delay = np.round(d / c * fs).astype(np.int64)
    keep = nonzero & (delay < n_len)
    h = np.zeros(n_len)
    np.add.at(h, delay[keep], amp[keep] / (4.0 * np.pi * d[keep]))
    return h


# ---------------------------------------------------------------------------
# weighted overlap-add resynthesis
# ---------------------------------------------------------------------------

def _overlap_add_py(frames, hop, window):
    n_frames, frame_len = frames.shape
    out_len = (n_frames - 1) * hop + frame_len
    out = np.zeros(out_len)
    norm = np.zeros(out_len)
    for t in range(n_frames):
        start = t * hop
        for i in range(frame_len):
            out[start + i] += frames[t, i] * window[i]
            norm[start + i] += window[i] * window[i]
    return out, norm


def _overlap_add_np(frames, hop, window):
    n_frames, frame_len = frames.shape
    out_len = (n_frames - 1) * hop + frame_len
    out = np.zeros(out_len)
    norm = np.zeros(out_len)
    wsq = window * window
    for t in range(n_frames):
        start = t * hop
        out[start:start + frame_len] += frames[t] * window
        norm[start:start + frame_len] += wsq
    return out, norm


# ---------------------------------------------------------------------------
# diagonal-covariance GMM log densities (weighted)
# ---------------------------------------------------------------------------

def _gmm_logprob_py(x, means, inv_vars, log_consts):
    n_frames, dim = x.shape
    n_comp = means.shape[0]
    out = np.empty((n_frames, n_comp))
    for t in range(n_frames):
        for c in range(n_comp):
            acc = 0.0
            for d in range(dim):
                diff = x[t, d] - means[c, d]
                acc += diff * diff * inv_vars[c, d]
            out[t, c] = log_consts[c] - 0.5 * acc
    return out


def _gmm_logprob_np(x, means, inv_vars, log_consts):
    # expand (x - mu)^2 / var so the heavy lifting is two matmuls
    quad = (x * x) @ inv_vars.T - 2.0 * (x @ (means * inv_vars).T)
    quad += np.sum(means * means * inv_vars, axis=1)[None, :]
    return log_consts[None, :] - 0.5 * quad


# ---------------------------------------------------------------------------
# centered sliding-window mean/variance (short-time normalization)
# ---------------------------------------------------------------------------

def _sliding_moments_py(x, half):
    n_frames, dim = x.shape
    means = np.empty((n_frames, dim))
    variances = np.empty((n_frames, dim))
    for t in range(n_frames):
        lo = t - half
        if lo < 0:
            lo = 0
        hi = t + half + 1
        if hi > n_frames:
            hi = n_frames
        n = hi - lo
        for d in range(dim):
            s = 0.0
            for i in range(lo, hi):
                s += x[i, d]
            m = s / n
            v = 0.0
            for i in range(lo, hi):
                diff = x[i, d] - m
                v += diff * diff
            means[t, d] = m
            variances[t, d] = v / n
    return means, variances


def _sliding_moments_np(x, half):
    n_frames = x.shape[0]
    csum = np.cumsum(x, axis=0)
    csq = np.cumsum(x * x, axis=0)
    zeros = np.zeros((1, x.shape[1]))
    csum = np.concatenate([zeros, csum], axis=0)
    csq = np.concatenate([zeros, csq], axis=0)
    lo = np.maximum(np.arange(n_frames) - half, 0)
    hi = np.minimum(np.arange(n_frames) + half + 1, n_frames)
    counts = (hi - lo)[:, None].astype(float)
    means = (csum[hi] - csum[lo]) / counts
    variances = (csq[hi] - csq[lo]) / counts - means * means
    np.maximum(variances, 0.0, out=variances)
    return means, variances


if _HAVE_NUMBA:
    _image_source_taps_nb = njit(cache=True)(_image_source_taps_py)
    _overlap_add_nb = njit(cache=True)(_overlap_add_py)
    _gmm_logprob_nb = njit(cache=True)(_gmm_logprob_py)
    _sliding_moments_nb = njit(cache=True)(_sliding_moments_py)


def image_source_taps(dims, beta, src, mic, max_order, fs, c, n_len):
    """Accumulate image-source taps into an impulse response of length n_len."""
    args = (
        np.ascontiguousarray(dims, dtype=np.float64),
        np.ascontiguousarray(beta, dtype=np.float64),
        np.ascontiguousarray(src, dtype=np.float64),
        np.ascontiguousarray(mic, dtype=np.float64),
        int(max_order), float(fs), float(c), int(n_len),
    )
    if _use_numba:
        return _image_source_taps_nb(*args)
    return _image_source_taps_np(*args)


def overlap_add(frames, hop, window):
    """Weighted overlap-add; returns (signal, window-square normalization)."""
    frames = np.ascontiguousarray(frames, dtype=np.float64)
    window = np.ascontiguousarray(window, dtype=np.float64)
    if _use_numba:
        return _overlap_add_nb(frames, int(hop), window)
    return _overlap_add_np(frames, int(hop), window)


def gmm_logprob(x, means, inv_vars, log_consts):
    """Per-frame weighted log densities log w_c + log N(x_t; mu_c, sigma2_c)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    means = np.ascontiguousarray(means, dtype=np.float64)
    inv_vars = np.ascontiguousarray(inv_vars, dtype=np.float64)
    log_consts = np.ascontiguousarray(log_consts, dtype=np.float64)
    if _use_numba:
        return _gmm_logprob_nb(x, means, inv_vars, log_consts)
    return _gmm_logprob_np(x, means, inv_vars, log_consts)


def sliding_moments(x, half):
    """Centered sliding-window mean and variance per dimension, edges clipped."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if _use_numba:
        return _sliding_moments_nb(x, int(half))
    return _sliding_moments_np(x, int(half))
