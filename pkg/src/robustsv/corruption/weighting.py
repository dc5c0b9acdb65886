"""IEC A-weighting, used to measure mixing SNRs the way a listener would.

The magnitude response follows the analytic IEC 61672 curve, normalized to
exactly 0 dB at 1 kHz. Filtering is done zero-phase in the frequency domain
over the whole signal, so the realized response equals the analytic curve at
every DFT frequency.
"""

from __future__ import annotations

import numpy as np

from ..audio import AudioSignal


def _response(freq_hz: np.ndarray) -> np.ndarray:
    f2 = np.square(np.asarray(freq_hz, dtype=np.float64))
    num = (12194.0 ** 2) * f2 * f2
    den = (
        (f2 + 20.6 ** 2)
        * np.sqrt((f2 + 107.7 ** 2) * (f2 + 737.9 ** 2))
        * (f2 + 12194.0 ** 2)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0.0, num / den, 0.0)


_REF_1K = float(_response(np.array(1000.0)))


def a_weight_gain_db(freq_hz) -> np.ndarray | float:
    """A-weighting gain in dB (0 dB at 1 kHz); -inf at DC."""
    linear = _response(np.asarray(freq_hz, dtype=np.float64)) / _REF_1K
    with np.errstate(divide="ignore"):
        gain = 20.0 * np.log10(linear)
    if np.isscalar(freq_hz) or np.ndim(freq_hz) == 0:
        return float(gain)
    return gain


def a_weight_filter(signal: AudioSignal) -> AudioSignal:
    """Apply the A-weighting magnitude response zero-phase to a waveform."""
    if len(signal) == 0:
        return signal
    spectrum = np.fft.rfft(signal.samples)
    freqs = np.fft.rfftfreq(len(signal), d=1.0 / signal.sample_rate)
    weighted = spectrum * (_response(freqs) / _REF_1K)
    out = np.fft.irfft(weighted, n=len(signal))
    return AudioSignal(out, signal.sample_rate)
