"""Room impulse response simulation by the image-source method.

Rooms are axis-aligned boxes with a per-wall reflection coefficient. Each
image contributes a single tap: delay round(d / c * fs), amplitude
prod(reflections encountered) / (4 pi d). Omnidirectional source and
microphone, nearest-sample delays, fixed speed of sound c = 343 m/s.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..audio import AudioSignal, read_wav, write_wav
from ..kernels import image_source_taps

SPEED_OF_SOUND = 343.0
MAX_REFLECTION_ORDER = 20


@dataclass(frozen=True)
class RoomSpec:
    """Box room: dimensions, six wall reflection coefficients, source/noise/mic
    positions, and the maximum number of reflections to simulate.

    Reflection order: (x=0 wall, x=L wall, y=0, y=L, z=0, z=L).
    """

    room_id: str
    dims: tuple[float, float, float]
    reflection: tuple[float, float, float, float, float, float]
    source_pos: tuple[float, float, float]
    noise_pos: tuple[float, float, float]
    mic_pos: tuple[float, float, float]
    max_order: int

    def __post_init__(self):
        if any(d <= 0 for d in self.dims):
            raise ValueError(f"room {self.room_id}: dimensions must be positive")
        if any(not (0.0 <= r < 1.0) for r in self.reflection):
            raise ValueError(f"room {self.room_id}: reflection coefficients must be in [0, 1)")
        if not (0 <= self.max_order <= MAX_REFLECTION_ORDER):
            raise ValueError(
                f"room {self.room_id}: max_order must be in [0, {MAX_REFLECTION_ORDER}]")
        for name, pos in (("source", self.source_pos), ("noise", self.noise_pos),
                          ("mic", self.mic_pos)):
            if any(not (0.0 < p < d) for p, d in zip(pos, self.dims)):
                raise ValueError(
                    f"room {self.room_id}: {name} position {pos} not strictly inside {self.dims}")


def generate_rir(room: RoomSpec, src: tuple[float, float, float],
                 mic: tuple[float, float, float], sample_rate: int) -> AudioSignal:
    """Simulate the impulse response between a source and the room microphone."""
    src_arr = np.asarray(src, dtype=np.float64)
    mic_arr = np.asarray(mic, dtype=np.float64)
    dims = np.asarray(room.dims, dtype=np.float64)
    for name, pos in (("source", src_arr), ("mic", mic_arr)):
        if np.any(pos <= 0.0) or np.any(pos >= dims):
            raise ValueError(f"{name} position {tuple(pos)} outside room {room.room_id}")
    if np.linalg.norm(src_arr - mic_arr) == 0.0:
        raise ValueError("source and microphone coincide")
    n_max = room.max_order // 2 + 1
    reach = np.linalg.norm((2 * n_max + 1) * dims) + np.linalg.norm(dims)
    n_len = int(np.round(reach / SPEED_OF_SOUND * sample_rate)) + 1
    h = image_source_taps(dims, np.asarray(room.reflection, dtype=np.float64),
                          src_arr, mic_arr, room.max_order, sample_rate,
                          SPEED_OF_SOUND, n_len)
    last = np.flatnonzero(h)
    if last.size == 0:
        raise RuntimeError(f"room {room.room_id}: impulse response came out empty")
    return AudioSignal(h[:last[-1] + 1], sample_rate)


@dataclass(frozen=True)
class RirPair:
    """Speech and noise impulse responses from the same room (different sources)."""

    speech_rir: AudioSignal
    noise_rir: AudioSignal
    room_id: str

    def __post_init__(self):
        if self.speech_rir.sample_rate != self.noise_rir.sample_rate:
            raise ValueError("speech and noise RIRs must share a sample rate")
        if len(self.speech_rir) == 0 or len(self.noise_rir) == 0:
            raise ValueError("RIRs must be non-empty")


def rir_pair(room: RoomSpec, sample_rate: int) -> RirPair:
    """Generate the speech/noise RIR pair for a room."""
    return RirPair(
        speech_rir=generate_rir(room, room.source_pos, room.mic_pos, sample_rate),
        noise_rir=generate_rir(room, room.noise_pos, room.mic_pos, sample_rate),
        room_id=room.room_id,
    )


def random_room(room_id: str, rng: np.random.Generator,
                dims_range=((2.5, 8.0), (2.5, 8.0), (2.2, 4.0)),
                reflection_range=(0.2, 0.85),
                max_order: int = 8) -> RoomSpec:
    """Draw a plausible room with source/noise/mic placed inside with margin."""
    dims = tuple(float(rng.uniform(lo, hi)) for lo, hi in dims_range)
    reflection = tuple(float(rng.uniform(*reflection_range)) for _ in range(6))

    def place():
        return tuple(float(rng.uniform(0.3, d - 0.3)) for d in dims)

    mic = place()
    source = place()
    while np.linalg.norm(np.subtract(source, mic)) < 0.5:
        source = place()
    noise = place()
    while (np.linalg.norm(np.subtract(noise, mic)) < 0.5
           or np.linalg.norm(np.subtract(noise, source)) < 0.3):
        noise = place()
    return RoomSpec(room_id, dims, reflection, source, noise, mic, max_order)


# room pool manifests: one room per line, whitespace-separated
# id Lx Ly Lz r1..r6 sx sy sz nx ny nz mx my mz max_order

def save_room_manifest(path, rooms: list[RoomSpec]) -> None:
    lines = []
    for r in rooms:
        fields = [r.room_id]
        fields += [repr(v) for v in r.dims]
        fields += [repr(v) for v in r.reflection]
        fields += [repr(v) for v in r.source_pos]
        fields += [repr(v) for v in r.noise_pos]
        fields += [repr(v) for v in r.mic_pos]
        fields.append(str(r.max_order))
        lines.append(" ".join(fields))
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text("\n".join(lines) + "\n")


def load_room_manifest(path) -> list[RoomSpec]:
    rooms = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 20:
            raise ValueError(f"malformed room line ({len(parts)} fields): {line!r}")
        vals = [float(x) for x in parts[1:19]]
        rooms.append(RoomSpec(
            room_id=parts[0],
            dims=tuple(vals[0:3]),
            reflection=tuple(vals[3:9]),
            source_pos=tuple(vals[9:12]),
            noise_pos=tuple(vals[12:15]),
            mic_pos=tuple(vals[15:18]),
            max_order=int(parts[19]),
        ))
    return rooms


def save_rir_pool(dir_path, pairs: list[RirPair]) -> None:
    """Store measured-style RIR pairs as WAV files plus an id manifest.

    Each pair is jointly peak-normalized before the 16-bit write; absolute
    RIR scale is irrelevant downstream because the SNR gate rescales noise
    against the reverberated speech.
    """
    dir_path = Path(dir_path)
    dir_path.mkdir(parents=True, exist_ok=True)
    ids = []
    for pair in pairs:
        peak = max(np.max(np.abs(pair.speech_rir.samples)),
                   np.max(np.abs(pair.noise_rir.samples)))
        scale = 0.5 / peak if peak > 0 else 1.0
        for role, rir in (("speech", pair.speech_rir),
                          ("noise", pair.noise_rir)):
            write_wav(dir_path / f"{pair.room_id}_{role}.wav",
                      AudioSignal(rir.samples * scale, rir.sample_rate))
        ids.append(pair.room_id)
    (dir_path / "pool.txt").write_text("".join(i + "\n" for i in ids))


def load_rir_pool(dir_path, sample_rate: int = 8000) -> list[RirPair]:
    dir_path = Path(dir_path)
    pairs = []
    for room_id in (dir_path / "pool.txt").read_text().split():
        pairs.append(RirPair(
            speech_rir=read_wav(dir_path / f"{room_id}_speech.wav", sample_rate),
            noise_rir=read_wav(dir_path / f"{room_id}_noise.wav", sample_rate),
            room_id=room_id,
        ))
    return pairs
