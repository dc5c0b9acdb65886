"""The corruption pipeline: reverberate speech and noise separately, set the
A-weighted VAD-gated SNR, sum, and pass through the telephone channel.

Omitted stages are identity except the telephone filter, which is always
applied. Every stochastic choice (noise crop offset) is driven by an
explicit seed so a corrupted corpus is exactly reconstructible from its
recipe file.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from ..audio import AudioSignal
from ..vad import VadMask, energy_vad
from ..spectral import frame_signal
from .channel import telephone_filter
from .rir import RirPair
from .weighting import a_weight_filter


def vad_gated_energy(signal: AudioSignal, mask: VadMask) -> float:
    """Energy of the A-weighted signal summed over VAD speech frames."""
    weighted = a_weight_filter(signal)
    frames = frame_signal(weighted.samples, mask.frame_len, mask.hop)
    n = min(frames.shape[0], len(mask))
    if n == 0:
        return 0.0
    flags = mask.flags[:n]
    return float(np.sum(frames[:n][flags] ** 2))


def snr_scale(speech: AudioSignal, noise: AudioSignal, vad_mask: VadMask,
              target_snr_db: float) -> float:
    """Gain g such that speech + g*noise has the target A-weighted SNR.

    Energies are measured on A-weighted versions of both signals, restricted
    to the speech frames of vad_mask (the clean signal's VAD).
    """
    if vad_mask.n_speech == 0:
        raise ValueError("VAD mask marks no speech frames")
    es = vad_gated_energy(speech, vad_mask)
    en = vad_gated_energy(noise, vad_mask)
    if en <= 0.0:
        raise ValueError("noise has zero energy within the speech frames")
    return float(np.sqrt(es / (en * 10.0 ** (target_snr_db / 10.0))))


def measure_snr(speech_part: AudioSignal, noise_part: AudioSignal,
                vad_mask: VadMask) -> float:
    """A-weighted VAD-gated SNR in dB between two mixture components."""
    es = vad_gated_energy(speech_part, vad_mask)
    en = vad_gated_energy(noise_part, vad_mask)
    return float(10.0 * np.log10(es / en))


def crop_noise(noise: AudioSignal, n_samples: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """Random-offset crop with wraparound looping; returns (samples, offset)."""
    src = noise.samples
    if src.size == 0:
        raise ValueError("empty noise signal")
    offset = int(rng.integers(0, src.size))
    idx = (offset + np.arange(n_samples)) % src.size
    return src[idx], offset


def _reverberate(samples: np.ndarray, rir: AudioSignal, n_out: int) -> np.ndarray:
    full = fftconvolve(samples, rir.samples)
    return full[:n_out]


@dataclass(frozen=True)
class CorruptionResult:
    """Corrupted output plus the pre-telephone mixture components."""

    output: AudioSignal
    speech_part: AudioSignal
    noise_part: AudioSignal | None
    noise_gain: float | None
    crop_offset: int | None
    vad_mask: VadMask


def corrupt(speech: AudioSignal, rir_pair: RirPair | None = None,
            noise: AudioSignal | None = None, target_snr_db: float | None = None,
            rng: np.random.Generator | None = None) -> CorruptionResult:
    """Run the corruption pipeline on one utterance.

    Parameters
    ----------
    speech : AudioSignal
        Clean input; its VAD gates the SNR energy measurement.
    rir_pair : RirPair, optional
        Room responses; speech and noise are convolved with their own RIR
        and trimmed back to the speech length.
    noise : AudioSignal, optional
        Noise source, looped/cropped to the speech length at a seeded random
        offset. Requires target_snr_db.
    target_snr_db : float, optional
        A-weighted VAD-gated SNR of the mixture.
    rng : numpy Generator, optional
        Drives the noise crop offset; required when noise is given.
    """
    if noise is not None and target_snr_db is None:
        raise ValueError("target_snr_db is required when noise is present")
    if rir_pair is not None:
        if rir_pair.speech_rir.sample_rate != speech.sample_rate:
            raise ValueError("RIR sample rate does not match speech")
    n = len(speech)
    mask = energy_vad(speech)

    if rir_pair is not None:
        speech_rev = _reverberate(speech.samples, rir_pair.speech_rir, n)
    else:
        speech_rev = speech.samples
    speech_part = AudioSignal(speech_rev, speech.sample_rate)

    noise_part = None
    gain = None
    offset = None
    if noise is not None:
        if noise.sample_rate != speech.sample_rate:
            raise ValueError("noise sample rate does not match speech")
        if rng is None:
            rng = np.random.default_rng(0)
        cropped, offset = crop_noise(noise, n, rng)
        if rir_pair is not None:
            noise_rev = _reverberate(cropped, rir_pair.noise_rir, n)
        else:
            noise_rev = cropped
        raw_noise = AudioSignal(noise_rev, speech.sample_rate)
        gain = snr_scale(speech_part, raw_noise, mask, float(target_snr_db))
        noise_part = AudioSignal(gain * noise_rev, speech.sample_rate)
        mixture = speech_rev + noise_part.samples
    else:
        mixture = speech_rev

    output = telephone_filter(AudioSignal(mixture, speech.sample_rate))
    return CorruptionResult(output, speech_part, noise_part, gain, offset, mask)


@dataclass(frozen=True)
class CorruptionRecipe:
    """One line of a recipe file; '-' marks an omitted stage."""

    utt_id: str
    noise_id: str | None
    room_id: str | None
    snr_db: float | None
    seed: int

    def to_line(self) -> str:
        return " ".join([
            self.utt_id,
            self.noise_id if self.noise_id else "-",
            self.room_id if self.room_id else "-",
            repr(float(self.snr_db)) if self.snr_db is not None else "-",
            str(self.seed),
        ])

    @classmethod
    def from_line(cls, line: str) -> "CorruptionRecipe":
        parts = line.split()
        if len(parts) != 5:
            raise ValueError(f"malformed recipe line: {line!r}")
        return cls(
            utt_id=parts[0],
            noise_id=None if parts[1] == "-" else parts[1],
            room_id=None if parts[2] == "-" else parts[2],
            snr_db=None if parts[3] == "-" else float(parts[3]),
            seed=int(parts[4]),
        )


def save_recipes(path, recipes: list[CorruptionRecipe]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text("".join(r.to_line() + "\n" for r in recipes))


def load_recipes(path) -> list[CorruptionRecipe]:
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(CorruptionRecipe.from_line(line))
    return out
