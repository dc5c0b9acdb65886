"""Artificial corruption of clean speech: room reverberation, additive
noise at a controlled A-weighted SNR, and a telephone band-pass channel."""

from .channel import telephone_filter
from .mix import (
    CorruptionRecipe,
    CorruptionResult,
    corrupt,
    crop_noise,
    load_recipes,
    measure_snr,
    save_recipes,
    snr_scale,
    vad_gated_energy,
)
from .noise import (
    NoiseSample,
    build_noise_pool,
    synth_babble,
    synth_hum,
    synth_shaped_white,
)
from .rir import (
    RirPair,
    RoomSpec,
    generate_rir,
    load_rir_pool,
    load_room_manifest,
    random_room,
    rir_pair,
    save_rir_pool,
    save_room_manifest,
)
from .weighting import a_weight_filter, a_weight_gain_db

__all__ = [
    "CorruptionRecipe",
    "CorruptionResult",
    "NoiseSample",
    "RirPair",
    "RoomSpec",
    "a_weight_filter",
    "a_weight_gain_db",
    "build_noise_pool",
    "corrupt",
    "crop_noise",
    "generate_rir",
    "load_recipes",
    "load_rir_pool",
    "load_room_manifest",
    "measure_snr",
    "random_room",
    "rir_pair",
    "save_recipes",
    "save_rir_pool",
    "save_room_manifest",
    "snr_scale",
    "synth_babble",
    "synth_hum",
    "synth_shaped_white",
    "telephone_filter",
    "vad_gated_energy",
]
