"""A-weighting curve anchors and the zero-phase filter realization."""

import numpy as np
import pytest

from robustsv.audio import AudioSignal
from robustsv.corruption.weighting import a_weight_filter, a_weight_gain_db

from .conftest import make_tone

# oracle: analytic IEC 61672 magnitude normalized to 0 dB at 1 kHz,
# evaluated independently at the anchor frequencies below
CURVE_ANCHORS_DB = {
    100.0: -19.145096,
    500.0: -3.247949,
    1000.0: 0.0,
    2000.0: 1.201533,
    3800.0: 1.030344,
}


@pytest.mark.parametrize("freq,expected", sorted(CURVE_ANCHORS_DB.items()))
def test_gain_curve_anchors(freq, expected):
    assert a_weight_gain_db(freq) == pytest.approx(expected, abs=1e-4)


def test_gain_at_dc_is_minus_inf():
    assert a_weight_gain_db(0.0) == -np.inf


def test_gain_vector_input():
    freqs = np.array([100.0, 1000.0, 2000.0])
    gains = a_weight_gain_db(freqs)
    assert gains.shape == (3,)
    assert gains[1] == pytest.approx(0.0, abs=1e-12)


def test_filter_realizes_curve_on_tones():
    # long tones so spectral leakage is negligible; compare RMS ratios
    for freq in (100.0, 500.0, 2000.0):
        tone = make_tone(freq, 2.0, amplitude=0.3)
        out = a_weight_filter(tone)
        measured_db = 20 * np.log10(np.std(out.samples) / np.std(tone.samples))
        assert measured_db == pytest.approx(CURVE_ANCHORS_DB[freq], abs=0.05)


def test_filter_is_zero_phase():
    # an impulse must stay centered: peak of |h| at the impulse position
    x = np.zeros(4096)
    x[2048] = 1.0
    out = a_weight_filter(AudioSignal(x, 8000))
    assert np.argmax(np.abs(out.samples)) == 2048


def test_filter_empty_signal_passthrough():
    sig = AudioSignal(np.zeros(0), 8000)
    assert a_weight_filter(sig) is sig
