"""STFT analysis/synthesis: frame arithmetic, floors, and reconstruction."""

import numpy as np
import pytest

from robustsv.audio import AudioSignal
from robustsv.spectral import (
    FFT_SIZE,
    FRAME_LEN,
    HOP,
    MAG_FLOOR,
    Spectrogram,
    frame_count,
    frame_signal,
    istft,
    stft,
)

from .conftest import make_tone


def test_frame_geometry_constants():
    # 25 ms / 10 ms at 8 kHz, fft padded to the next power of two
    assert (FRAME_LEN, HOP, FFT_SIZE) == (200, 80, 256)


@pytest.mark.parametrize("n,expected", [
    (0, 0), (199, 0), (200, 1), (279, 1), (280, 2),
    (8000, 98),  # 1 + (8000 - 200) // 80
])
def test_frame_count(n, expected):
    assert frame_count(n) == expected


def test_frame_signal_slices_match_manual_strides():
    x = np.arange(500, dtype=np.float64)
    frames = frame_signal(x, 200, 80)
    assert frames.shape == (4, 200)
    assert np.array_equal(frames[2], x[160:360])


def test_stft_shape_and_bin_count(speech_signal):
    spec = stft(speech_signal)
    assert spec.n_bins == FFT_SIZE // 2 + 1 == 129
    assert spec.n_frames == frame_count(len(speech_signal))
    assert np.all(np.isfinite(spec.log_mag))


def test_stft_log_floor_on_silence():
    spec = stft(AudioSignal(np.zeros(1000), 8000))
    assert np.all(spec.log_mag == np.log(MAG_FLOOR))


def test_stft_tone_peaks_at_expected_bin():
    sig = make_tone(1000.0, 0.5)
    spec = stft(sig)
    # 1 kHz at 8 kHz / 256-point fft -> bin 32
    assert np.argmax(np.mean(spec.log_mag, axis=0)) == 32


def test_istft_reconstructs_interior(speech_signal):
    recon = istft(stft(speech_signal))
    n = min(len(recon), len(speech_signal))
    # skip one frame at each edge where overlap-add coverage is partial
    lo, hi = FRAME_LEN, n - FRAME_LEN
    err = np.max(np.abs(recon.samples[lo:hi] - speech_signal.samples[lo:hi]))
    assert err < 1e-8


def test_istft_linear_in_magnitude():
    sig = make_tone(700.0, 0.4, amplitude=0.3)
    spec = stft(sig)
    doubled = Spectrogram(spec.log_mag + np.log(2.0), spec.phase, spec.frame_len,
                          spec.hop, spec.fft_size, spec.sample_rate)
    lo, hi = FRAME_LEN, len(sig) - 2 * FRAME_LEN
    ref = istft(spec).samples[lo:hi]
    out = istft(doubled).samples[lo:hi]
    assert np.max(np.abs(out - 2.0 * ref)) < 1e-8


def test_stft_rejects_short_signal():
    with pytest.raises(ValueError):
        stft(AudioSignal(np.zeros(FRAME_LEN - 1), 8000))
