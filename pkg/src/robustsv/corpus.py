"""Synthetic multi-speaker speech so the whole experiment runs without
licensed data.

Each speaker is a randomized source-filter voice: a base pitch, a vocal
tract length factor, and a personal vowel-formant table. Utterances are
syllable sequences (voiced vowels, occasional fricative bursts, short
pauses) with per-utterance pitch/gain variation, so same-speaker sessions
differ while speakers stay separable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .audio import AudioSignal
from .seeding import derive_seed

SAMPLE_RATE = 8000

# canonical vowel formants (Hz), scaled per speaker
_VOWELS = np.array([
    [270.0, 2290.0, 3010.0],   # i
    [530.0, 1840.0, 2480.0],   # e
    [730.0, 1090.0, 2440.0],   # a
    [570.0, 840.0, 2410.0],    # o
    [300.0, 870.0, 2240.0],    # u
])
_BANDWIDTHS = np.array([80.0, 110.0, 160.0])


@dataclass(frozen=True)
class SpeakerProfile:
    speaker_id: str
    f0_hz: float
    formant_scale: float
    vowel_table: np.ndarray
    vowel_weights: np.ndarray
    bandwidth_scale: float
    tilt: float
    breathiness: float
    fricative_hz: float
    fricative_rate: float


def random_speaker(speaker_id: str, rng: np.random.Generator) -> SpeakerProfile:
    f0 = float(np.exp(rng.uniform(np.log(90.0), np.log(240.0))))
    scale = float(rng.uniform(0.88, 1.12))
    # idiosyncratic vowel geometry on top of the global length factor; the
    # jitter has to stay well above the per-segment wobble or neighbouring
    # voices collapse once mean normalization removes the pure scale shift
    jitter = np.exp(rng.normal(0.0, 0.14, size=_VOWELS.shape))
    table = np.clip(_VOWELS * scale * jitter, 220.0, 3500.0)
    weights = rng.dirichlet(np.full(len(_VOWELS), 2.0))
    return SpeakerProfile(
        speaker_id, f0, scale, table, weights,
        bandwidth_scale=float(np.exp(rng.uniform(np.log(0.7), np.log(1.4)))),
        tilt=float(rng.uniform(0.93, 0.985)),
        breathiness=float(rng.uniform(0.005, 0.05)),
        fricative_hz=float(rng.uniform(2100.0, 3300.0)),
        fricative_rate=float(rng.uniform(0.10, 0.34)))


def _resonator_coeffs(freq: float, bandwidth: float, fs: int):
    r = np.exp(-np.pi * bandwidth / fs)
    theta = 2.0 * np.pi * freq / fs
    return [1.0 - r], [1.0, -2.0 * r * np.cos(theta), r * r]


def _impulse_train(f0_curve: np.ndarray, fs: int, tilt: float,
                   rng: np.random.Generator) -> np.ndarray:
    """Glottal pulse train with phase-accumulated pitch and mild shaping."""
    phase = np.cumsum(f0_curve / fs)
    pulses = np.zeros(f0_curve.size)
    pulses[np.flatnonzero(np.diff(np.floor(phase)) > 0)] = 1.0
    # leaky integration gives the glottal-like spectral tilt; the leak is a
    # per-speaker trait
    shaped = lfilter([1.0], [1.0, -tilt], pulses)
    return shaped + 0.002 * rng.standard_normal(f0_curve.size)


def _envelope(n: int, fs: int, attack_s: float = 0.015,
              release_s: float = 0.025) -> np.ndarray:
    env = np.ones(n)
    a = min(int(attack_s * fs), n // 2)
    r = min(int(release_s * fs), n // 2)
    if a:
        env[:a] = 0.5 - 0.5 * np.cos(np.pi * np.arange(a) / a)
    if r:
        env[n - r:] = 0.5 + 0.5 * np.cos(np.pi * np.arange(r) / r)
    return env


def _voiced_segment(profile: SpeakerProfile, f0_utt: float, n: int, fs: int,
                    rng: np.random.Generator, position: float) -> np.ndarray:
    k = int(rng.choice(len(profile.vowel_table), p=profile.vowel_weights))
    formants = profile.vowel_table[k] * np.exp(rng.normal(0.0, 0.015, size=3))
    # declination: pitch drifts down across the utterance
    f0 = f0_utt * (1.05 - 0.13 * position)
    vibrato = 1.0 + 0.01 * np.sin(
        2.0 * np.pi * 5.5 * np.arange(n) / fs + rng.uniform(0, 2 * np.pi))
    src = _impulse_train(f0 * vibrato, fs, profile.tilt, rng)
    out = src
    for freq, bw in zip(formants, _BANDWIDTHS * profile.bandwidth_scale):
        b, a = _resonator_coeffs(min(freq, 3500.0), bw, fs)
        out = lfilter(b, a, out)
    out = out + profile.breathiness * rng.standard_normal(n)
    return out * _envelope(n, fs)


def _fricative_segment(profile: SpeakerProfile, n: int, fs: int,
                       rng: np.random.Generator) -> np.ndarray:
    noise = rng.standard_normal(n)
    centre = profile.fricative_hz * np.exp(rng.normal(0.0, 0.02))
    b, a = _resonator_coeffs(min(centre, 3500.0), 600.0, fs)
    return 0.25 * lfilter(b, a, noise) * _envelope(n, fs)


def synth_utterance(profile: SpeakerProfile, duration_s: float,
                    rng: np.random.Generator,
                    sample_rate: int = SAMPLE_RATE) -> AudioSignal:
    """One utterance: leading/trailing silence around a syllable stream."""
    fs = sample_rate
    total = int(round(duration_s * fs))
    pieces = [np.zeros(int(rng.uniform(0.04, 0.09) * fs))]
    n_have = pieces[0].size
    while n_have < total:
        seg_n = int(rng.uniform(0.12, 0.28) * fs)
        position = min(n_have / total, 1.0)
        if rng.uniform() < profile.fricative_rate:
            seg = _fricative_segment(profile, seg_n, fs, rng)
        else:
            f0_utt = profile.f0_hz * np.exp(rng.normal(0.0, 0.025))
            seg = _voiced_segment(profile, f0_utt, seg_n, fs, rng, position)
        pause = np.zeros(int(rng.uniform(0.01, 0.06) * fs))
        pieces.extend([seg, pause])
        n_have += seg_n + pause.size
    samples = np.concatenate(pieces)[:total]

    rms = np.sqrt(np.mean(samples ** 2))
    gain_db = rng.uniform(-3.0, 3.0)
    samples = samples * (0.06 / max(rms, 1e-9)) * 10.0 ** (gain_db / 20.0)
    peak = np.max(np.abs(samples))
    if peak > 0.95:
        samples = samples * (0.95 / peak)
    return AudioSignal(samples, fs)


def build_corpus(n_speakers: int, utts_per_speaker: int, duration_s: float,
                 seed: int, prefix: str = "spk",
                 ) -> tuple[dict[str, AudioSignal], dict[str, str]]:
    """Corpus as (utt_id -> signal, utt_id -> speaker_id).

    Every utterance draws its own generator from (seed, utt_id), so the
    corpus is reproducible and independent of generation order.
    """
    signals: dict[str, AudioSignal] = {}
    speakers: dict[str, str] = {}
    for si in range(n_speakers):
        speaker_id = f"{prefix}{si:03d}"
        profile = random_speaker(
            speaker_id,
            np.random.default_rng(derive_seed(seed, speaker_id, "profile")))
        for ui in range(utts_per_speaker):
            utt_id = f"{speaker_id}_u{ui:02d}"
            rng = np.random.default_rng(derive_seed(seed, utt_id))
            signals[utt_id] = synth_utterance(profile, duration_s, rng)
            speakers[utt_id] = speaker_id
    return signals, speakers
