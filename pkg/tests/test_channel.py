"""Telephone band-pass: stopband attenuation and passband flatness."""

import numpy as np
import pytest

from robustsv.audio import AudioSignal
from robustsv.corruption.channel import telephone_filter

from .conftest import make_tone


def _gain_db(freq_hz: float) -> float:
    tone = make_tone(freq_hz, 2.0, amplitude=0.3)
    out = telephone_filter(tone)
    # skip the transient before measuring
    return 20 * np.log10(np.std(out.samples[4000:]) / np.std(tone.samples[4000:]))


def test_passband_near_unity():
    assert abs(_gain_db(1000.0)) < 1.0
    assert abs(_gain_db(2000.0)) < 1.0


def test_stopband_attenuation_exceeds_30db():
    assert _gain_db(60.0) < -30.0
    assert _gain_db(3900.0) < -30.0


def test_band_edges_rolloff_ordering():
    assert _gain_db(150.0) < _gain_db(300.0) < _gain_db(1000.0) + 1.0


def test_rejects_wrong_sample_rate():
    with pytest.raises(ValueError):
        telephone_filter(AudioSignal(np.zeros(100), 16000))


def test_empty_signal_passthrough():
    sig = AudioSignal(np.zeros(0), 8000)
    assert telephone_filter(sig) is sig


def test_zero_in_zero_out():
    out = telephone_filter(AudioSignal(np.zeros(1000), 8000))
    assert np.array_equal(out.samples, np.zeros(1000))
