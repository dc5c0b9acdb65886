"""Synthetic noise sources: mains hum, spectrally shaped white noise, babble.

Pools built here are split into disjoint train/dev/test groups by
construction; external noise files can be dropped into a pool alongside the
synthetic ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..audio import AudioSignal
from ..vad import VadMask, energy_vad

CATEGORIES = ("hum", "shaped_white", "babble", "external")
SPLITS = ("train", "dev", "test")


@dataclass(frozen=True)
class NoiseSample:
    noise_id: str
    signal: AudioSignal
    category: str
    split: str

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown noise category {self.category!r}")
        if self.split not in SPLITS:
            raise ValueError(f"unknown noise split {self.split!r}")


def synth_hum(freq_hz: float, duration_s: float, sample_rate: int,
              noise_id: str = "hum", split: str = "train",
              n_harmonics: int = 4, rng: np.random.Generator | None = None) -> NoiseSample:
    """Mains hum: a sinusoid plus decaying harmonics and a trace of noise."""
    if freq_hz >= sample_rate / 2:
        raise ValueError(f"hum frequency {freq_hz} Hz aliases at fs {sample_rate}")
    if freq_hz * (n_harmonics + 1) >= sample_rate / 2:
        n_harmonics = max(0, int(sample_rate / 2 / freq_hz) - 2)
    rng = rng or np.random.default_rng(0)
    n = int(round(duration_s * sample_rate))
    t = np.arange(n) / sample_rate
    out = np.sin(2 * np.pi * freq_hz * t)
    for k in range(2, n_harmonics + 2):
        out += (0.25 / (k - 1)) * np.sin(2 * np.pi * k * freq_hz * t + rng.uniform(0, 2 * np.pi))
    out += 0.003 * rng.standard_normal(n)
    out /= np.max(np.abs(out))
    return NoiseSample(noise_id, AudioSignal(0.9 * out, sample_rate), "hum", split)


def synth_shaped_white(shape_spec: list[tuple[float, float]], duration_s: float,
                       sample_rate: int, noise_id: str = "shaped", split: str = "train",
                       rng: np.random.Generator | None = None) -> NoiseSample:
    """White noise shaped by a piecewise-linear log-spectral envelope.

    Parameters
    ----------
    shape_spec : list of (freq_hz, gain_db)
        Envelope control points; gains are linearly interpolated over
        frequency and held flat outside the listed range.
    """
    rng = rng or np.random.default_rng(0)
    n = int(round(duration_s * sample_rate))
    white = rng.standard_normal(n)
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, d=1.0 / sample_rate)
    points = sorted(shape_spec)
    gains_db = np.interp(freqs, [p[0] for p in points], [p[1] for p in points])
    spectrum *= 10.0 ** (gains_db / 20.0)
    shaped = np.fft.irfft(spectrum, n=n)
    shaped /= np.max(np.abs(shaped))
    return NoiseSample(noise_id, AudioSignal(0.9 * shaped, sample_rate), "shaped_white", split)


def synth_babble(speech_pool: list[AudioSignal], k_speakers: int, duration_s: float,
                 noise_id: str = "babble", split: str = "train",
                 rng: np.random.Generator | None = None,
                 vad=energy_vad) -> NoiseSample:
    """Babble: k speech streams with silence removed, RMS-equalized, summed.

    Each stream is built by dropping VAD-silent frames from one pool entry,
    looping the remainder to the target length. The sum is peak-normalized.
    """
    if k_speakers < 2:
        raise ValueError("babble needs at least 2 speakers")
    if len(speech_pool) < k_speakers:
        raise ValueError(
            f"speech pool of {len(speech_pool)} streams cannot supply k={k_speakers}")
    rng = rng or np.random.default_rng(0)
    sample_rate = speech_pool[0].sample_rate
    n = int(round(duration_s * sample_rate))
    picks = rng.choice(len(speech_pool), size=k_speakers, replace=False)
    total = np.zeros(n)
    for idx in picks:
        stream = speech_pool[int(idx)]
        if stream.sample_rate != sample_rate:
            raise ValueError("babble pool streams must share a sample rate")
        mask = vad(stream)
        active = _keep_speech(stream.samples, mask)
        if active.size == 0:
            active = stream.samples
        reps = int(np.ceil(n / active.size))
        looped = np.tile(active, reps)[:n]
        rms = np.sqrt(np.mean(looped * looped))
        if rms > 0:
            looped = looped / rms
        total += looped
    peak = np.max(np.abs(total))
    if peak > 0:
        total = total / peak * 0.9
    return NoiseSample(noise_id, AudioSignal(total, sample_rate), "babble", split)


def _keep_speech(samples: np.ndarray, mask: VadMask) -> np.ndarray:
    kept = []
    for t in range(len(mask)):
        if mask.flags[t]:
            start = t * mask.hop
            kept.append(samples[start:start + mask.hop])
    if not kept:
        return np.zeros(0)
    return np.concatenate(kept)


def build_noise_pool(counts: dict[str, int], duration_s: float, sample_rate: int,
                     babble_speech: list[AudioSignal], babble_k: int,
                     seed: int) -> list[NoiseSample]:
    """Synthesize a noise pool with disjoint train/dev/test splits.

    counts maps split name to pool size. Categories cycle through hum,
    several shaped-white envelopes, and babble so every split sees each kind.
    """
    rng = np.random.default_rng(seed)
    envelopes = [
        ("flat", [(0.0, 0.0), (4000.0, 0.0)]),
        ("lowtilt", [(0.0, 6.0), (4000.0, -18.0)]),
        ("hightilt", [(0.0, -12.0), (4000.0, 6.0)]),
        ("midband", [(0.0, -20.0), (800.0, 0.0), (1600.0, 0.0), (4000.0, -20.0)]),
        ("lowband", [(0.0, 0.0), (500.0, 0.0), (1500.0, -30.0), (4000.0, -30.0)]),
    ]
    pool: list[NoiseSample] = []
    for split in SPLITS:
        n_total = counts.get(split, 0)
        for i in range(n_total):
            kind = i % 4
            noise_id = f"{split}-noise-{i:03d}"
            if kind == 0:
                freq = 50.0 if (i // 4) % 2 == 0 else 100.0
                pool.append(synth_hum(freq, duration_s, sample_rate, noise_id, split,
                                      rng=np.random.default_rng(rng.integers(2 ** 63))))
            elif kind in (1, 2):
                _, env = envelopes[(i // 2) % len(envelopes)]
                pool.append(synth_shaped_white(env, duration_s, sample_rate,
                                               noise_id, split,
                                               rng=np.random.default_rng(rng.integers(2 ** 63))))
            else:
                k = min(babble_k, len(babble_speech))
                pool.append(synth_babble(babble_speech, k, duration_s, noise_id, split,
                                         rng=np.random.default_rng(rng.integers(2 ** 63))))
    ids = [s.noise_id for s in pool]
    assert len(ids) == len(set(ids)), "noise ids must be unique across splits"
    return pool
