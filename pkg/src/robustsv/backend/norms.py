"""Global-mean and length normalization applied between LDA and PLDA."""

from __future__ import annotations

import numpy as np


def global_mean(vectors: np.ndarray) -> np.ndarray:
    """Mean over the backend training vectors; stored with the model."""
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.shape[0] == 0:
        raise ValueError("no vectors to average")
    return vectors.mean(axis=0)


def normalize(vectors: np.ndarray, mean: np.ndarray) -> np.ndarray:
    """Center on the training mean and project to the unit sphere."""
    vectors = np.asarray(vectors, dtype=np.float64)
    single = vectors.ndim == 1
    v = np.atleast_2d(vectors) - mean
    norms = np.linalg.norm(v, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("vector equals the global mean; cannot normalize")
    out = v / norms[:, None]
    return out[0] if single else out
