"""Spectral-domain enhancement: a context-windowed MLP regressing corrupted
log-magnitude frames onto clean ones, plus waveform resynthesis."""

from .dataset import (
    CONTEXT_FRAMES,
    build_enhancer_set,
    build_pair_set,
    build_pairs,
    context_window_size,
    stack_context,
)
from .enhance import enhance_spectrogram, enhance_waveform
from .mlp import (
    MlpModel,
    Normalizer,
    TrainingDivergedError,
    forward_normalized,
    init_params,
    load_mlp,
    loss_and_grads,
    predict,
    save_mlp,
    train_mlp,
)

__all__ = [
    "CONTEXT_FRAMES",
    "MlpModel",
    "Normalizer",
    "TrainingDivergedError",
    "build_enhancer_set",
    "build_pair_set",
    "build_pairs",
    "context_window_size",
    "enhance_spectrogram",
    "enhance_waveform",
    "forward_normalized",
    "init_params",
    "load_mlp",
    "loss_and_grads",
    "predict",
    "save_mlp",
    "stack_context",
    "train_mlp",
]
