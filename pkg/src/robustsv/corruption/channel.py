"""Telephone-channel band-pass applied as the final corruption stage.

Narrowband telephony mask: 300-3400 Hz, realized as a 4th-order Butterworth
band-pass in cascaded second-order sections. Attenuation at 60 Hz and
3.9 kHz exceeds 30 dB; mid-band loss is well under 1 dB.
"""

from __future__ import annotations

import numpy as np
from scipy import signal as sps

from ..audio import AudioSignal

BAND_HZ = (300.0, 3400.0)
_ORDER = 4
_sos_cache: dict[int, np.ndarray] = {}


def _sos(sample_rate: int) -> np.ndarray:
    if sample_rate not in _sos_cache:
        _sos_cache[sample_rate] = sps.butter(
            _ORDER, BAND_HZ, btype="bandpass", fs=sample_rate, output="sos")
    return _sos_cache[sample_rate]


def telephone_filter(signal: AudioSignal) -> AudioSignal:
    """Band-limit a waveform to the 300-3400 Hz telephone mask."""
    if signal.sample_rate != 8000:
        raise ValueError("telephone filter expects the 8 kHz pipeline rate")
    if len(signal) == 0:
        return signal
    out = sps.sosfilt(_sos(signal.sample_rate), signal.samples)
    return AudioSignal(out, signal.sample_rate)
