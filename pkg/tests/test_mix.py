"""SNR-controlled mixing: gain closed forms, closure, determinism, recipes."""

import numpy as np
import pytest

from robustsv.audio import AudioSignal
from robustsv.corruption.channel import telephone_filter
from robustsv.corruption.mix import (
    CorruptionRecipe,
    corrupt,
    crop_noise,
    load_recipes,
    measure_snr,
    save_recipes,
    snr_scale,
    vad_gated_energy,
)
from robustsv.corruption.noise import synth_shaped_white
from robustsv.corruption.rir import RoomSpec, rir_pair
from robustsv.vad import VadMask, energy_vad

from .conftest import make_tone

FS = 8000


def _flat_noise(duration_s=3.0, seed=9):
    return synth_shaped_white([(0.0, 0.0), (4000.0, 0.0)], duration_s, FS,
                              rng=np.random.default_rng(seed)).signal


def _pair(max_order=8):
    room = RoomSpec("mix-room", (4.5, 3.8, 2.7), (0.75,) * 6,
                    (1.1, 1.0, 1.4), (3.2, 2.9, 1.1), (2.4, 2.0, 1.5), max_order)
    return rir_pair(room, FS)


def test_snr_scale_equal_energy_identity():
    # same signal as speech and noise: energies match, so target 0 dB -> g=1
    tone = make_tone(1000.0, 1.0)
    mask = energy_vad(tone)
    assert snr_scale(tone, tone, mask, 0.0) == pytest.approx(1.0, rel=1e-12)
    # doubling speech amplitude doubles the 0 dB gain
    double = AudioSignal(tone.samples * 2.0 * 0.95, FS)
    assert snr_scale(double, tone, mask, 0.0) == pytest.approx(1.9, rel=1e-12)
    # +10 dB target divides the gain by sqrt(10)
    g0 = snr_scale(tone, tone, mask, 0.0)
    g10 = snr_scale(tone, tone, mask, 10.0)
    assert g0 / g10 == pytest.approx(np.sqrt(10.0), rel=1e-12)


def test_snr_scale_error_contracts():
    tone = make_tone(1000.0, 1.0)
    silent_mask = VadMask(np.zeros(20, dtype=bool))
    with pytest.raises(ValueError):
        snr_scale(tone, tone, silent_mask, 0.0)
    silence = AudioSignal(np.zeros(len(tone)), FS)
    with pytest.raises(ValueError):
        snr_scale(tone, silence, energy_vad(tone), 0.0)


def test_gain_closure_is_algebraically_exact(speech_signal):
    # the measured SNR of (speech_part, g*noise_part) must equal the target
    # to floating-point precision, with and without reverberation
    noise = _flat_noise()
    for target in (0.0, 7.0, 13.5, 21.0):
        res = corrupt(speech_signal, rir_pair=None, noise=noise,
                      target_snr_db=target, rng=np.random.default_rng(3))
        got = measure_snr(res.speech_part, res.noise_part, res.vad_mask)
        assert got == pytest.approx(target, abs=1e-9)
    res = corrupt(speech_signal, rir_pair=_pair(), noise=noise,
                  target_snr_db=5.0, rng=np.random.default_rng(3))
    got = measure_snr(res.speech_part, res.noise_part, res.vad_mask)
    assert got == pytest.approx(5.0, abs=1e-9)


def test_identity_corruption_is_telephone_only(speech_signal):
    res = corrupt(speech_signal)
    want = telephone_filter(speech_signal)
    assert np.array_equal(res.output.samples, want.samples)
    assert res.noise_part is None and res.noise_gain is None
    assert np.array_equal(res.speech_part.samples, speech_signal.samples)


def test_output_length_matches_input(speech_signal):
    res = corrupt(speech_signal, rir_pair=_pair(), noise=_flat_noise(),
                  target_snr_db=10.0, rng=np.random.default_rng(5))
    assert len(res.output) == len(speech_signal)
    assert len(res.speech_part) == len(speech_signal)
    assert len(res.noise_part) == len(speech_signal)


def test_vad_comes_from_clean_speech(speech_signal):
    res = corrupt(speech_signal, noise=_flat_noise(), target_snr_db=0.0,
                  rng=np.random.default_rng(6))
    clean_mask = energy_vad(speech_signal)
    assert np.array_equal(res.vad_mask.flags, clean_mask.flags)


def test_corrupt_requires_target_with_noise(speech_signal):
    with pytest.raises(ValueError):
        corrupt(speech_signal, noise=_flat_noise())


def test_corrupt_deterministic_under_seed(speech_signal):
    noise = _flat_noise()
    a = corrupt(speech_signal, rir_pair=_pair(), noise=noise, target_snr_db=9.0,
                rng=np.random.default_rng(17))
    b = corrupt(speech_signal, rir_pair=_pair(), noise=noise, target_snr_db=9.0,
                rng=np.random.default_rng(17))
    assert a.crop_offset == b.crop_offset
    assert np.array_equal(a.output.samples, b.output.samples)


def test_crop_noise_wraps_around():
    noise = AudioSignal(np.arange(10, dtype=np.float64) / 10.0, FS)

    class FixedRng:
        def integers(self, lo, hi):
            return 7

    cropped, offset = crop_noise(noise, 6, FixedRng())
    assert offset == 7
    assert np.array_equal(cropped * 10, [7, 8, 9, 0, 1, 2])
    with pytest.raises(ValueError):
        crop_noise(AudioSignal(np.zeros(0), FS), 4, FixedRng())


def test_vad_gated_energy_counts_only_speech_frames():
    x = np.zeros(80 * 10 + 120)
    x[:80 * 3] = 0.5  # first three frames active
    sig = AudioSignal(x, FS)
    flags = np.zeros(10, dtype=bool)
    flags[:3] = True
    partial = vad_gated_energy(sig, VadMask(flags))
    everything = vad_gated_energy(sig, VadMask(np.ones(10, dtype=bool)))
    assert 0 < partial <= everything


def test_recipe_line_roundtrip(tmp_path):
    recipes = [
        CorruptionRecipe("utt_a", "train-noise-001", "room3", 7.25, 99),
        CorruptionRecipe("utt_b", None, None, None, 4),
        CorruptionRecipe("utt_c", "n", None, -3.0, 12345),
    ]
    path = tmp_path / "recipes.txt"
    save_recipes(path, recipes)
    assert load_recipes(path) == recipes
    # omitted fields serialize as '-'
    lines = path.read_text().splitlines()
    assert lines[1] == "utt_b - - - 4"


def test_recipe_rejects_malformed_line():
    with pytest.raises(ValueError):
        CorruptionRecipe.from_line("too few fields")
