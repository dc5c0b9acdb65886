"""Linear discriminant analysis for i-vector dimensionality reduction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from ..container import load_container, save_container

RIDGE_FRACTION = 1e-6


@dataclass(frozen=True)
class LdaTransform:
    projection: np.ndarray

    @property
    def out_dim(self) -> int:
        return self.projection.shape[1]


def _scatter_matrices(vectors: np.ndarray, labels: list[str]):
    labels = np.asarray(labels)
    dim = vectors.shape[1]
    overall = vectors.mean(axis=0)
    sb = np.zeros((dim, dim))
    sw = np.zeros((dim, dim))
    for spk in np.unique(labels):
        grp = vectors[labels == spk]
        mean = grp.mean(axis=0)
        diff = mean - overall
        sb += grp.shape[0] * np.outer(diff, diff)
        centered = grp - mean
        sw += centered.T @ centered
    return sb, sw


def train_lda(vectors: np.ndarray, labels: list[str], out_dim: int
              ) -> LdaTransform:
    """Top generalized eigenvectors of (Sw^-1 Sb) by descending eigenvalue.

    Sw gets a ridge of RIDGE_FRACTION * trace/dim so the generalized
    problem stays definite even with few sessions per speaker.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.shape[0] != len(labels):
        raise ValueError("one label per vector required")
    n_speakers = len(set(labels))
    if out_dim >= n_speakers:
        raise ValueError(
            f"out_dim {out_dim} needs more than {n_speakers} speakers "
            "(between-class rank is speakers - 1)")
    if out_dim < 1 or out_dim > vectors.shape[1]:
        raise ValueError("out_dim out of range")
    sb, sw = _scatter_matrices(vectors, labels)
    ridge = RIDGE_FRACTION * np.trace(sw) / sw.shape[0]
    sw = sw + np.eye(sw.shape[0]) * max(ridge, 1e-12)
    eigvals, eigvecs = eigh(sb, sw)
    order = np.argsort(eigvals)[::-1]
    return LdaTransform(np.ascontiguousarray(eigvecs[:, order[:out_dim]]))


def apply_lda(transform: LdaTransform, vectors: np.ndarray) -> np.ndarray:
    return np.asarray(vectors, dtype=np.float64) @ transform.projection


def save_lda(path, transform: LdaTransform) -> None:
    save_container(path, "lda", {"projection": transform.projection})


def load_lda(path) -> LdaTransform:
    arrays, _ = load_container(path, "lda")
    return LdaTransform(arrays["projection"])
