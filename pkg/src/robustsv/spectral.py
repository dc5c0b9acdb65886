"""Framing, STFT/ISTFT, and log-magnitude spectrum extraction.

Default analysis geometry is 25 ms Hamming frames with a 10 ms hop,
zero-padded to a 256-point FFT, which yields the 129-bin spectra the
enhancement network consumes. Magnitudes are floored before the log so
silence stays finite; phase is carried alongside for resynthesis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioSignal
from .kernels import overlap_add

FRAME_LEN = 200
HOP = 80
FFT_SIZE = 256
MAG_FLOOR = 1e-8


def frame_count(n_samples: int, frame_len: int = FRAME_LEN, hop: int = HOP) -> int:
    """Number of full frames: 1 + floor((len - frame_len) / hop)."""
    if n_samples < frame_len:
        return 0
    return 1 + (n_samples - frame_len) // hop


def frame_signal(samples: np.ndarray, frame_len: int = FRAME_LEN, hop: int = HOP) -> np.ndarray:
    """Slice a waveform into overlapping frames, shape (T, frame_len)."""
    n_frames = frame_count(samples.size, frame_len, hop)
    if n_frames == 0:
        return np.zeros((0, frame_len))
    idx = np.arange(frame_len)[None, :] + hop * np.arange(n_frames)[:, None]
    return samples[idx]


@dataclass
class Spectrogram:
    """Per-frame natural-log magnitudes plus phase, with the frame geometry."""

    log_mag: np.ndarray
    phase: np.ndarray
    frame_len: int = FRAME_LEN
    hop: int = HOP
    fft_size: int = FFT_SIZE
    sample_rate: int = 8000

    @property
    def n_frames(self) -> int:
        return self.log_mag.shape[0]

    @property
    def n_bins(self) -> int:
        return self.log_mag.shape[1]


def stft(signal: AudioSignal, frame_len: int = FRAME_LEN, hop: int = HOP,
         fft_size: int = FFT_SIZE, floor: float = MAG_FLOOR) -> Spectrogram:
    """Hamming-windowed STFT with floored log magnitudes.

    Parameters
    ----------
    signal : AudioSignal
        Non-empty waveform, at least one frame long.
    frame_len, hop, fft_size : int
        Analysis geometry; frame_len <= fft_size, 0 < hop <= frame_len.
    floor : float
        Magnitude floor applied before the log.
    """
    if len(signal) == 0:
        raise ValueError("cannot compute STFT of an empty signal")
    if hop <= 0:
        raise ValueError("hop must be positive")
    if hop > frame_len:
        raise ValueError("hop must not exceed frame_len")
    if frame_len > fft_size:
        raise ValueError("frame_len must not exceed fft_size")
    if len(signal) < frame_len:
        raise ValueError(
            f"signal of {len(signal)} samples is shorter than one frame ({frame_len})")
    frames = frame_signal(signal.samples, frame_len, hop)
    window = np.hamming(frame_len)
    spectrum = np.fft.rfft(frames * window[None, :], n=fft_size, axis=1)
    log_mag = np.log(np.maximum(np.abs(spectrum), floor))
    phase = np.angle(spectrum)
    phase = np.where(phase == -np.pi, np.pi, phase)
    return Spectrogram(log_mag, phase, frame_len, hop, fft_size, signal.sample_rate)


def istft(spec: Spectrogram) -> AudioSignal:
    """Weighted overlap-add inverse with synthesis-window normalization.

    Output length is (T - 1) * hop + frame_len. Positions where the summed
    squared window underflows keep the raw overlap-add value.
    """
    if spec.hop <= 0:
        raise ValueError("hop must be positive")
    if spec.n_frames == 0:
        raise ValueError("cannot invert an empty spectrogram")
    spectrum = np.exp(spec.log_mag) * np.exp(1j * spec.phase)
    frames = np.fft.irfft(spectrum, n=spec.fft_size, axis=1)[:, :spec.frame_len]
    window = np.hamming(spec.frame_len)
    out, norm = overlap_add(frames, spec.hop, window)
    safe = norm > 1e-12
    out[safe] /= norm[safe]
    return AudioSignal(np.clip(out, -1.0, 1.0), spec.sample_rate)
