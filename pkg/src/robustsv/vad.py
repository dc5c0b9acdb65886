"""Energy-based voice activity detection.

A frame counts as speech when its log energy is within ``margin_db`` of the
utterance's loudest frame. The threshold being relative to the utterance
maximum makes the mask invariant to global gain; frames of pure digital
silence are excluded by an absolute energy floor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioSignal
from .spectral import FRAME_LEN, HOP, frame_signal

DEFAULT_MARGIN_DB = 30.0
ENERGY_FLOOR = 1e-12


@dataclass(frozen=True)
class VadMask:
    flags: np.ndarray
    frame_len: int = FRAME_LEN
    hop: int = HOP

    def __post_init__(self):
        object.__setattr__(self, "flags", np.asarray(self.flags, dtype=bool))

    def __len__(self) -> int:
        return self.flags.size

    @property
    def n_speech(self) -> int:
        return int(np.count_nonzero(self.flags))


def energy_vad(signal: AudioSignal, frame_len: int = FRAME_LEN, hop: int = HOP,
               margin_db: float = DEFAULT_MARGIN_DB) -> VadMask:
    """Mark frames within margin_db of the loudest frame as speech."""
    if len(signal) == 0:
        raise ValueError("cannot run VAD on an empty signal")
    frames = frame_signal(signal.samples, frame_len, hop)
    energies = np.sum(frames * frames, axis=1)
    loudest = np.max(energies) if energies.size else 0.0
    if loudest <= ENERGY_FLOOR:
        flags = np.zeros(energies.size, dtype=bool)
    else:
        threshold = loudest * 10.0 ** (-margin_db / 10.0)
        flags = (energies >= threshold) & (energies > ENERGY_FLOOR)
    return VadMask(flags, frame_len, hop)


def mask_to_rle(mask: VadMask) -> str:
    """Serialize as 'first_flag:run,run,...' run lengths, one line per utterance."""
    flags = mask.flags
    if flags.size == 0:
        return "0:"
    runs = []
    current = flags[0]
    length = 0
    for flag in flags:
        if flag == current:
            length += 1
        else:
            runs.append(length)
            current = flag
            length = 1
    runs.append(length)
    return f"{int(flags[0])}:{','.join(str(r) for r in runs)}"


def rle_to_mask(line: str, frame_len: int = FRAME_LEN, hop: int = HOP) -> VadMask:
    head, _, body = line.strip().partition(":")
    first = bool(int(head))
    if not body:
        return VadMask(np.zeros(0, dtype=bool), frame_len, hop)
    flags = []
    value = first
    for run in body.split(","):
        flags.extend([value] * int(run))
        value = not value
    return VadMask(np.array(flags, dtype=bool), frame_len, hop)
