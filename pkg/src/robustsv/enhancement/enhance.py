"""Apply a trained enhancement network to corrupted audio.

The network predicts the clean-minus-corrupted log-magnitude correction
from context-stacked corrupted frames; adding it back onto the corrupted
centre frame gives the clean estimate, and the corrupted phase is kept for
resynthesis. A zero-output network therefore passes audio through
untouched.
"""

from __future__ import annotations

import numpy as np

from ..audio import AudioSignal
from ..spectral import Spectrogram, istft, stft
from .dataset import CONTEXT_FRAMES, stack_context
from .mlp import MlpModel, predict


def enhance_spectrogram(model: MlpModel, spec: Spectrogram,
                        context: int = CONTEXT_FRAMES) -> Spectrogram:
    """Add the network's predicted correction to the log magnitudes."""
    expected = spec.n_bins * (2 * context + 1)
    if model.weights[0].shape[0] != expected:
        raise ValueError(
            f"model expects {model.weights[0].shape[0]}-dim input, "
            f"got {expected} from {spec.n_bins} bins with context {context}")
    x = stack_context(spec.log_mag, context)
    correction = predict(model, x)
    return Spectrogram(
        log_mag=spec.log_mag + correction.astype(np.float64),
        phase=spec.phase, frame_len=spec.frame_len,
        hop=spec.hop, fft_size=spec.fft_size, sample_rate=spec.sample_rate)


def enhance_waveform(model: MlpModel, signal: AudioSignal,
                     context: int = CONTEXT_FRAMES) -> AudioSignal:
    """Analyse, enhance, and resynthesize with the corrupted phase."""
    spec = stft(signal)
    return istft(enhance_spectrogram(model, spec, context))
