"""MFCC chain: filterbank geometry, cepstra, STMVN, deltas, archive IO."""

import numpy as np
import pytest

from robustsv.audio import AudioSignal
from robustsv.features import (
    EmptyUtteranceError,
    FeatureMatrix,
    deltas,
    drop_silence,
    extract_features,
    mel_filterbank,
    mfcc,
    pre_emphasize,
    read_feature_archive,
    stmvn,
    write_feature_archive,
)
from robustsv.vad import VadMask, energy_vad

from .conftest import make_tone

FS = 8000


# ---------------------------------------------------------------------------
# filterbank and cepstra
# ---------------------------------------------------------------------------

def test_filterbank_geometry():
    bank = mel_filterbank(FS)
    assert bank.shape == (24, 129)
    assert np.all(bank >= 0)
    freqs = np.arange(129) * FS / 256.0
    for row in bank:
        support = freqs[row > 0]
        assert support.min() >= 120.0 - FS / 256.0  # one bin of slack
        assert support.max() <= 3800.0 + FS / 256.0
        assert row.sum() > 0  # no filter collapses to an empty triangle
    # triangles overlap: every interior filter shares support with the next
    for a, b in zip(bank[:-1], bank[1:]):
        assert np.any((a > 0) & (b > 0))


def test_filterbank_centres_increase_in_mel():
    bank = mel_filterbank(FS)
    centres = np.argmax(bank, axis=1)
    assert np.all(np.diff(centres) >= 1)
    # mel spacing: high-frequency triangles are wider in Hz than low ones
    widths = [(row > 0).sum() for row in bank]
    assert widths[-1] > widths[0]


def test_pre_emphasis_first_difference():
    x = np.array([1.0, 2.0, 3.0, 5.0])
    out = pre_emphasize(x, 0.97)
    assert out[0] == 1.0
    assert np.allclose(out[1:], x[1:] - 0.97 * x[:-1])


def test_mfcc_shape_one_second():
    sig = make_tone(440.0, 1.0)
    feats = mfcc(sig)
    assert feats.shape == (98, 20)  # 1 + (8000-200)//80 frames


def test_mfcc_gain_shift_lands_in_c0_only():
    # scaling the waveform by g adds 2*ln(g) to every log-mel energy; the
    # orthonormal DCT routes a constant shift entirely into c0, scaled by
    # sqrt(n_filters), leaving c1..c19 untouched
    rng = np.random.default_rng(0)
    white = AudioSignal(0.1 * rng.standard_normal(FS), FS)
    base = mfcc(white)
    scaled = mfcc(AudioSignal(white.samples * 4.0, FS))
    assert np.allclose(scaled[:, 1:], base[:, 1:], atol=1e-10)
    assert np.allclose(scaled[:, 0] - base[:, 0],
                       2.0 * np.log(4.0) * np.sqrt(24.0), atol=1e-10)


def test_mfcc_rejects_short_signal():
    with pytest.raises(ValueError):
        mfcc(AudioSignal(np.zeros(100), FS))


def test_mfcc_distinguishes_tones():
    low = mfcc(make_tone(300.0, 0.5)).mean(axis=0)
    high = mfcc(make_tone(2500.0, 0.5)).mean(axis=0)
    assert np.linalg.norm(low - high) > 1.0


# ---------------------------------------------------------------------------
# short-time mean/variance normalization
# ---------------------------------------------------------------------------

def test_stmvn_matches_brute_force():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((420, 3))
    out = stmvn(x, window_s=0.4)  # half window = 20 frames
    half = 20
    for t in (0, 5, 210, 419):
        seg = x[max(0, t - half):min(420, t + half + 1)]
        want = (x[t] - seg.mean(axis=0)) / np.maximum(seg.std(axis=0), 1e-6)
        assert out[t] == pytest.approx(want, abs=1e-9)


def test_stmvn_constant_input_gives_zeros():
    out = stmvn(np.full((50, 4), 3.25))
    assert np.array_equal(out, np.zeros((50, 4)))


def test_stmvn_short_utterance_is_global_norm():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((40, 2))  # much shorter than the 3 s window
    out = stmvn(x)
    want = (x - x.mean(axis=0)) / x.std(axis=0)
    assert np.allclose(out, want, atol=1e-9)


def test_stmvn_gain_invariance(speech_signal):
    # log power shifts additively under gain; c0 absorbs it and STMVN
    # removes the shift. Dither keeps pause frames off the log floor, where
    # the shift would stop being uniform.
    dithered = AudioSignal(
        speech_signal.samples
        + 1e-4 * np.random.default_rng(7).standard_normal(len(speech_signal)), FS)
    a = stmvn(mfcc(dithered))
    b = stmvn(mfcc(AudioSignal(dithered.samples * 0.1, FS)))
    assert np.max(np.abs(a - b)) < 1e-6


def test_stmvn_rejects_empty():
    with pytest.raises(ValueError):
        stmvn(np.zeros((0, 5)))


# ---------------------------------------------------------------------------
# delta features
# ---------------------------------------------------------------------------

def test_deltas_shape_and_constant_input():
    x = np.full((30, 4), 2.0)
    out = deltas(x)
    assert out.shape == (30, 12)
    assert np.array_equal(out[:, 4:], np.zeros((30, 8)))


def test_deltas_linear_ramp_interior_slope():
    # x_t = 3t: regression [(x(t+2)-x(t-2))*2 + (x(t+1)-x(t-1))] / 10 = 3
    t = np.arange(20, dtype=np.float64)
    x = (3.0 * t)[:, None]
    out = deltas(x)
    assert np.allclose(out[2:-2, 1], 3.0)
    assert np.allclose(out[4:-4, 2], 0.0)  # second difference of a line


def test_deltas_brute_force_oracle():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((25, 2))
    out = deltas(x)

    def ref_delta(mat):
        t_len = mat.shape[0]
        res = np.zeros_like(mat)
        for t in range(t_len):
            tm2, tm1 = max(t - 2, 0), max(t - 1, 0)
            tp1, tp2 = min(t + 1, t_len - 1), min(t + 2, t_len - 1)
            res[t] = ((mat[tp2] - mat[tm2]) * 2 + (mat[tp1] - mat[tm1])) / 10.0
        return res

    d1 = ref_delta(x)
    d2 = ref_delta(d1)
    assert np.allclose(out[:, 2:4], d1, atol=1e-12)
    assert np.allclose(out[:, 4:6], d2, atol=1e-12)


# ---------------------------------------------------------------------------
# silence dropping and the full chain
# ---------------------------------------------------------------------------

def test_drop_silence_selects_rows():
    x = np.arange(12, dtype=np.float64).reshape(6, 2)
    mask = VadMask(np.array([1, 0, 1, 1, 0, 0], dtype=bool))
    out = drop_silence(x, mask)
    assert np.array_equal(out, x[[0, 2, 3]])
    with pytest.raises(ValueError):
        drop_silence(x, VadMask(np.ones(5, dtype=bool)))
    with pytest.raises(EmptyUtteranceError):
        drop_silence(x, VadMask(np.zeros(6, dtype=bool)))


def test_extract_features_shape_and_speech_only(speech_signal):
    fm = extract_features(speech_signal, "u1")
    assert fm.utt_id == "u1"
    assert fm.frames.shape[1] == 60
    assert fm.frames.shape[0] == energy_vad(speech_signal).n_speech
    assert np.all(np.isfinite(fm.frames))


def test_extract_features_external_mask_fixes_selection(speech_signal):
    mask = energy_vad(speech_signal)
    noisy = AudioSignal(
        speech_signal.samples
        + 0.01 * np.random.default_rng(4).standard_normal(len(speech_signal)), FS)
    fm = extract_features(noisy, "u2", mask=mask)
    assert fm.frames.shape[0] == mask.n_speech


def test_feature_matrix_validates():
    with pytest.raises(ValueError):
        FeatureMatrix("u", np.zeros(5))  # must be 2-D
    with pytest.raises(ValueError):
        FeatureMatrix("u", np.array([[np.inf, 0.0]]))


def test_archive_roundtrip(tmp_path):
    rng = np.random.default_rng(5)
    feats = {
        "spk0_u0": rng.standard_normal((17, 60)),
        "spk0_u1": rng.standard_normal((3, 60)),
        "spk1_u0": rng.standard_normal((99, 60)),
    }
    path = tmp_path / "f.fa"
    write_feature_archive(path, feats)
    back = read_feature_archive(path)
    assert set(back) == set(feats)
    for key in feats:
        assert np.array_equal(back[key], feats[key])


def test_archive_rejects_trailing_garbage(tmp_path):
    path = tmp_path / "f.fa"
    write_feature_archive(path, {"u": np.zeros((2, 3))})
    path.write_bytes(path.read_bytes() + b"xx")
    with pytest.raises(ValueError):
        read_feature_archive(path)
