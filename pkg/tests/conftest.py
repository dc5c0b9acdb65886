"""Shared fixtures: deterministic synthetic speech at the 8 kHz pipeline rate."""

import numpy as np
import pytest

from robustsv.audio import AudioSignal
from robustsv.corpus import random_speaker, synth_utterance

SAMPLE_RATE = 8000


def make_tone(freq_hz: float, duration_s: float, amplitude: float = 0.5,
              sample_rate: int = SAMPLE_RATE) -> AudioSignal:
    t = np.arange(int(round(duration_s * sample_rate))) / sample_rate
    return AudioSignal(amplitude * np.sin(2 * np.pi * freq_hz * t), sample_rate)


@pytest.fixture(scope="session")
def speech_signal() -> AudioSignal:
    """One deterministic synthetic utterance, ~1.6 s with leading silence."""
    rng = np.random.default_rng(42)
    profile = random_speaker("spk_fix", rng)
    return synth_utterance(profile, 1.6, np.random.default_rng(43), SAMPLE_RATE)


@pytest.fixture(scope="session")
def speech_pool() -> list[AudioSignal]:
    """Six utterances from distinct synthetic speakers (babble material)."""
    pool = []
    for i in range(6):
        rng = np.random.default_rng(100 + i)
        profile = random_speaker(f"spk_p{i}", rng)
        pool.append(synth_utterance(profile, 1.4, np.random.default_rng(200 + i), SAMPLE_RATE))
    return pool
