"""Mono waveform container and 16-bit PCM WAV file I/O.

Every pipeline stage consumes and produces :class:`AudioSignal`. Files are
read at any sample rate and resampled to the pipeline rate by linear
interpolation; writes always quantize to 16-bit PCM at the signal's rate.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

PIPELINE_RATE = 8000

_PCM_FULL_SCALE = 32768.0


class AudioLoadError(Exception):
    """Base class for WAV ingestion failures."""


class UnsupportedEncodingError(AudioLoadError):
    """File is not 16-bit integer PCM."""


class ChannelCountError(AudioLoadError):
    """File is not mono."""


class TruncatedFileError(AudioLoadError):
    """File ends before the declared sample data."""


@dataclass(frozen=True)
class AudioSignal:
    """Mono waveform: float samples in [-1, 1] plus a sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if samples.size and not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if int(self.sample_rate) <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def peak_normalized(self, peak: float = 0.95) -> "AudioSignal":
        top = np.max(np.abs(self.samples)) if self.samples.size else 0.0
        if top == 0.0:
            return self
        return AudioSignal(self.samples * (peak / top), self.sample_rate)


def resample(signal: AudioSignal, target_rate: int) -> AudioSignal:
    """Resample by linear interpolation onto the target rate's sample grid."""
    if signal.sample_rate == target_rate:
        return signal
    if signal.samples.size == 0:
        return AudioSignal(signal.samples, target_rate)
    n_out = int(round(signal.samples.size * target_rate / signal.sample_rate))
    if n_out <= 0:
        return AudioSignal(np.zeros(0), target_rate)
    t_out = np.arange(n_out) * (signal.sample_rate / target_rate)
    out = np.interp(t_out, np.arange(signal.samples.size), signal.samples)
    return AudioSignal(out, target_rate)


def read_wav(path, target_rate: int | None = PIPELINE_RATE) -> AudioSignal:
    """Read a 16-bit PCM mono WAV file.

    Parameters
    ----------
    path : str or Path
        File to read.
    target_rate : int or None
        Rate to resample to (linear interpolation). None keeps the file rate.

    Raises
    ------
    UnsupportedEncodingError
        Compressed or non-16-bit sample encoding.
    ChannelCountError
        More than one channel.
    TruncatedFileError
        Header or sample data ends early.
    """
    try:
        with wave.open(str(path), "rb") as wav:
            if wav.getcomptype() != "NONE":
                raise UnsupportedEncodingError(
                    f"{path}: compressed WAV ({wav.getcomptype()}) not supported")
            if wav.getsampwidth() != 2:
                raise UnsupportedEncodingError(
                    f"{path}: only 16-bit PCM supported, got {8 * wav.getsampwidth()}-bit")
            if wav.getnchannels() != 1:
                raise ChannelCountError(
                    f"{path}: expected mono, got {wav.getnchannels()} channels")
            n_frames = wav.getnframes()
            raw = wav.readframes(n_frames)
            if len(raw) < 2 * n_frames:
                raise TruncatedFileError(
                    f"{path}: expected {n_frames} frames, data holds {len(raw) // 2}")
            rate = wav.getframerate()
    except wave.Error as exc:
        raise TruncatedFileError(f"{path}: malformed WAV ({exc})") from exc
    except EOFError as exc:
        raise TruncatedFileError(f"{path}: file ends inside header") from exc
    pcm = np.frombuffer(raw, dtype="<i2")
    samples = pcm.astype(np.float64) / _PCM_FULL_SCALE
    signal = AudioSignal(samples, rate)
    if target_rate is not None and rate != target_rate:
        signal = resample(signal, target_rate)
    return signal


def write_wav(path, signal: AudioSignal) -> None:
    """Write as 16-bit PCM mono WAV, clipping to [-1, 1] before quantization."""
    if signal.samples.size and not np.all(np.isfinite(signal.samples)):
        raise ValueError("cannot write non-finite samples")
    clipped = np.clip(signal.samples, -1.0, 1.0 - 1.0 / _PCM_FULL_SCALE)
    pcm = np.round(clipped * _PCM_FULL_SCALE).astype("<i2")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(signal.sample_rate)
        wav.writeframes(pcm.tobytes())


def write_stereo_wav_for_tests(path, left: np.ndarray, right: np.ndarray, rate: int) -> None:
    """Helper used by tests to produce a 2-channel file the loader must reject."""
    pcm = np.empty(left.size * 2, dtype="<i2")
    pcm[0::2] = np.round(np.clip(left, -1, 1) * (_PCM_FULL_SCALE - 1)).astype("<i2")
    pcm[1::2] = np.round(np.clip(right, -1, 1) * (_PCM_FULL_SCALE - 1)).astype("<i2")
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(2)
        wav.setsampwidth(2)
        wav.setframerate(rate)
        wav.writeframes(pcm.tobytes())
