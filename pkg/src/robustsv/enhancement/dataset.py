"""Training pairs for the spectral autoencoder.

Each corrupted frame is stacked with +-CONTEXT_FRAMES neighbours into one
flat input vector; the target is the time-aligned clean frame. Frames past
either edge are replicated from the nearest real frame so every frame of an
utterance yields a pair.
"""

from __future__ import annotations

import numpy as np

from ..spectral import Spectrogram

CONTEXT_FRAMES = 15


def context_window_size(n_bins: int, context: int = CONTEXT_FRAMES) -> int:
    return n_bins * (2 * context + 1)


def stack_context(log_mag: np.ndarray, context: int = CONTEXT_FRAMES) -> np.ndarray:
    """Stack each frame with its +-context neighbours, replicating edges.

    Parameters
    ----------
    log_mag : (T, B) array
    context : int
        Frames taken on each side.

    Returns
    -------
    (T, B * (2*context + 1)) array, centre frame in the middle block.
    """
    t_len, n_bins = log_mag.shape
    if t_len == 0:
        return np.zeros((0, context_window_size(n_bins, context)))
    idx = np.arange(t_len)[:, None] + np.arange(-context, context + 1)[None, :]
    idx = np.clip(idx, 0, t_len - 1)
    return log_mag[idx].reshape(t_len, -1)


def build_pairs(corrupted: Spectrogram, clean: Spectrogram,
                context: int = CONTEXT_FRAMES,
                frame_stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Input/target pairs from one aligned (corrupted, clean) utterance.

    frame_stride > 1 subsamples the centre frames (contexts still use every
    frame), which trades training-set size for speed.
    """
    if corrupted.n_frames != clean.n_frames:
        raise ValueError(
            f"frame count mismatch: {corrupted.n_frames} vs {clean.n_frames}")
    if corrupted.n_bins != clean.n_bins:
        raise ValueError("bin count mismatch between corrupted and clean")
    x = stack_context(corrupted.log_mag, context)
    y = clean.log_mag.copy()
    if frame_stride > 1:
        x = x[::frame_stride]
        y = y[::frame_stride]
    return x, y


def build_pair_set(pairs: list[tuple[Spectrogram, Spectrogram]],
                   context: int = CONTEXT_FRAMES,
                   frame_stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate build_pairs over a list of utterance pairs."""
    xs, ys = [], []
    for corrupted, clean in pairs:
        x, y = build_pairs(corrupted, clean, context, frame_stride)
        xs.append(x.astype(np.float32))
        ys.append(y.astype(np.float32))
    if not xs:
        raise ValueError("no utterance pairs supplied")
    return np.concatenate(xs), np.concatenate(ys)


def build_enhancer_set(pairs: list[tuple[Spectrogram, Spectrogram]],
                       context: int = CONTEXT_FRAMES,
                       frame_stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Training set with residual targets: clean minus corrupted centre frame.

    The enhancer adds its prediction back onto the centre frame, so a
    zero-output network is an exact no-op and the net only has to learn the
    correction, not the speech itself.
    """
    x, y = build_pair_set(pairs, context, frame_stride)
    n_bins = pairs[0][0].n_bins
    centre = slice(context * n_bins, (context + 1) * n_bins)
    return x, y - x[:, centre]
