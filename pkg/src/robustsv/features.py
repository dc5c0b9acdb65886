"""MFCC front-end: 20 cepstra, short-time mean/variance normalization,
delta and double-delta, then VAD frame dropping — 60 dimensions out.

The analysis geometry (25 ms Hamming frames every 10 ms, 256-point FFT)
matches the enhancement STFT so VAD masks line up frame for frame.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.fft import dct

from .audio import AudioSignal
from .kernels import sliding_moments
from .spectral import FFT_SIZE, FRAME_LEN, HOP, frame_signal
from .vad import VadMask, energy_vad

N_CEPSTRA = 20
N_FILTERS = 24
MEL_FMIN_HZ = 120.0
MEL_FMAX_HZ = 3800.0
PRE_EMPHASIS = 0.97
ENERGY_LOG_FLOOR = 1e-12
STMVN_STD_FLOOR = 1e-6


class EmptyUtteranceError(Exception):
    """Raised when VAD dropping leaves no frames."""


@dataclass(frozen=True)
class FeatureMatrix:
    """Final per-utterance features plus the geometry they came from."""

    utt_id: str
    frames: np.ndarray
    frame_len: int = FRAME_LEN
    hop: int = HOP

    def __post_init__(self):
        if self.frames.ndim != 2:
            raise ValueError("frames must be 2-D")
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("non-finite feature values")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: int, n_filters: int = N_FILTERS,
                   fmin: float = MEL_FMIN_HZ, fmax: float = MEL_FMAX_HZ,
                   fft_size: int = FFT_SIZE) -> np.ndarray:
    """Triangular filters, rows summing over (fft_size//2 + 1) bins."""
    if fmax > sample_rate / 2:
        raise ValueError("fmax above Nyquist")
    edges_hz = _mel_to_hz(np.linspace(_hz_to_mel(fmin), _hz_to_mel(fmax),
                                      n_filters + 2))
    bin_hz = np.arange(fft_size // 2 + 1) * (sample_rate / fft_size)
    bank = np.zeros((n_filters, bin_hz.size))
    for i in range(n_filters):
        lo, mid, hi = edges_hz[i], edges_hz[i + 1], edges_hz[i + 2]
        rise = (bin_hz - lo) / (mid - lo)
        fall = (hi - bin_hz) / (hi - mid)
        bank[i] = np.maximum(0.0, np.minimum(rise, fall))
    return bank


def pre_emphasize(samples: np.ndarray, coeff: float = PRE_EMPHASIS) -> np.ndarray:
    out = samples.copy()
    out[1:] -= coeff * samples[:-1]
    return out


def mfcc(signal: AudioSignal, n_cepstra: int = N_CEPSTRA,
         n_filters: int = N_FILTERS, fmin: float = MEL_FMIN_HZ,
         fmax: float = MEL_FMAX_HZ, preemphasis: float = PRE_EMPHASIS
         ) -> np.ndarray:
    """Cepstra c0..c(n_cepstra-1) per frame, (T, n_cepstra)."""
    if len(signal) < FRAME_LEN:
        raise ValueError(
            f"signal of {len(signal)} samples is shorter than one frame")
    frames = frame_signal(pre_emphasize(signal.samples, preemphasis),
                          FRAME_LEN, HOP)
    windowed = frames * np.hamming(FRAME_LEN)
    power = np.abs(np.fft.rfft(windowed, n=FFT_SIZE, axis=1)) ** 2
    bank = mel_filterbank(signal.sample_rate, n_filters, fmin, fmax)
    log_mel = np.log(np.maximum(power @ bank.T, ENERGY_LOG_FLOOR))
    return dct(log_mel, type=2, norm="ortho", axis=1)[:, :n_cepstra]


def stmvn(features: np.ndarray, window_s: float = 3.0,
          hop_s: float = HOP / 8000.0) -> np.ndarray:
    """Normalize each frame by the mean/std of its centered window.

    The window is window_s seconds (clipped at utterance edges); shorter
    utterances degrade to global mean/variance normalization.
    """
    if features.shape[0] == 0:
        raise ValueError("empty feature matrix")
    half = int(round(window_s / hop_s)) // 2
    means, variances = sliding_moments(features, half)
    stds = np.maximum(np.sqrt(variances), STMVN_STD_FLOOR)
    return (features - means) / stds


def deltas(features: np.ndarray) -> np.ndarray:
    """Append delta and double-delta: regression over +-2 frames, edges
    replicated; (T, D) -> (T, 3D)."""
    d1 = _regression(features)
    d2 = _regression(d1)
    return np.concatenate([features, d1, d2], axis=1)


def _regression(x: np.ndarray) -> np.ndarray:
    t_len = x.shape[0]
    idx = np.clip(np.arange(t_len)[:, None] + np.array([-2, -1, 1, 2]),
                  0, t_len - 1)
    shifted = x[idx]
    num = (shifted[:, 3] - shifted[:, 0]) * 2 + (shifted[:, 2] - shifted[:, 1])
    return num / 10.0


def drop_silence(features: np.ndarray, mask: VadMask) -> np.ndarray:
    """Keep only VAD speech rows, preserving order."""
    if len(mask) != features.shape[0]:
        raise ValueError(
            f"mask length {len(mask)} != frame count {features.shape[0]}")
    if mask.n_speech == 0:
        raise EmptyUtteranceError("VAD dropped every frame")
    return features[mask.flags]


def extract_features(signal: AudioSignal, utt_id: str,
                     mask: VadMask | None = None) -> FeatureMatrix:
    """Full chain mfcc -> stmvn -> deltas -> drop_silence.

    The VAD mask defaults to one computed from the input itself; pass the
    clean signal's mask to keep frame selection fixed across corruption
    levels of the same utterance.
    """
    if mask is None:
        mask = energy_vad(signal)
    feats = deltas(stmvn(mfcc(signal)))
    n = min(feats.shape[0], len(mask))
    trimmed_mask = VadMask(mask.flags[:n], mask.frame_len, mask.hop)
    return FeatureMatrix(utt_id, drop_silence(feats[:n], trimmed_mask))


# Feature archive: one indexed binary file holding many utterances.
# Layout: magic, u32 count, then per record u16 id-length, utf-8 id,
# u32 T, u32 dim, T*dim float64 row-major.

_ARCHIVE_MAGIC = b"RSVFEAT1"


def write_feature_archive(path, features: dict[str, np.ndarray]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_ARCHIVE_MAGIC)
        fh.write(struct.pack("<I", len(features)))
        for utt_id, mat in features.items():
            mat = np.ascontiguousarray(mat, dtype=np.float64)
            ident = utt_id.encode()
            fh.write(struct.pack("<H", len(ident)))
            fh.write(ident)
            fh.write(struct.pack("<II", mat.shape[0], mat.shape[1]))
            fh.write(mat.tobytes())


def read_feature_archive(path) -> dict[str, np.ndarray]:
    path = Path(path)
    blob = path.read_bytes()
    if blob[:8] != _ARCHIVE_MAGIC:
        raise ValueError(f"{path} is not a feature archive")
    (count,) = struct.unpack_from("<I", blob, 8)
    pos = 12
    out: dict[str, np.ndarray] = {}
    for _ in range(count):
        (id_len,) = struct.unpack_from("<H", blob, pos)
        pos += 2
        utt_id = blob[pos:pos + id_len].decode()
        pos += id_len
        t_len, dim = struct.unpack_from("<II", blob, pos)
        pos += 8
        n_bytes = t_len * dim * 8
        mat = np.frombuffer(blob[pos:pos + n_bytes], dtype=np.float64)
        out[utt_id] = mat.reshape(t_len, dim).copy()
        pos += n_bytes
    if pos != len(blob):
        raise ValueError(f"{path}: trailing bytes after last record")
    return out
