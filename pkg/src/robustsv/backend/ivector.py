"""Total-variability subspace: EM training and i-vector extraction.

An utterance's Baum-Welch stats (n, f) against the UBM give the posterior
over the latent vector w via

    L = I + sum_c n_c T_c^T Sigma_c^-1 T_c,   E[w] = L^-1 T^T Sigma^-1 f

where T_c is the component's (D, R) block of the total-variability matrix.
The M-step solves per-component normal equations accumulated over all
utterances; no minimum-divergence re-estimation is applied.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..container import load_container, save_container
from .gmm import BwStats, GmmModel


@dataclass
class IVectorExtractor:
    """Stacked total-variability matrix (C, D, R) tied to its UBM."""

    t_matrix: np.ndarray
    ubm: GmmModel

    def __post_init__(self):
        c, d, r = self.t_matrix.shape
        if (c, d) != (self.ubm.n_components, self.ubm.dim):
            raise ValueError("t_matrix blocks do not match the UBM")
        if r > c * d:
            raise ValueError("i-vector dim exceeds supervector dim")

    @property
    def r_dim(self) -> int:
        return self.t_matrix.shape[2]


def _posterior(t_matrix: np.ndarray, inv_vars: np.ndarray, stats: BwStats):
    """(L, E[w]) for one utterance; L is the posterior precision."""
    r = t_matrix.shape[2]
    # T^T Sigma^-1 per component, reused for both L and the linear term
    t_weighted = t_matrix * inv_vars[:, :, None]
    lmat = np.eye(r)
    lmat += np.einsum("cdr,c,cds->rs", t_weighted, stats.n, t_matrix)
    rhs = np.einsum("cdr,cd->r", t_weighted, stats.f)
    return lmat, np.linalg.solve(lmat, rhs)


def extract_ivector(extractor: IVectorExtractor, stats: BwStats) -> np.ndarray:
    """Posterior mean of the latent vector for one utterance."""
    if stats.f.shape != (extractor.ubm.n_components, extractor.ubm.dim):
        raise ValueError("stats shape does not match the extractor")
    _, w = _posterior(extractor.t_matrix, 1.0 / extractor.ubm.variances, stats)
    return w


def train_tmatrix(stats_list: list[BwStats], ubm: GmmModel, r_dim: int,
                  iters: int = 10, seed: int = 0) -> IVectorExtractor:
    """EM for the total-variability matrix over a list of utterance stats."""
    if r_dim < 1:
        raise ValueError("i-vector dimension must be >= 1")
    if not stats_list:
        raise ValueError("no training statistics supplied")
    c, d = ubm.n_components, ubm.dim
    rng = np.random.default_rng(seed)
    t_matrix = rng.standard_normal((c, d, r_dim)) * 0.1
    inv_vars = 1.0 / ubm.variances

    for _ in range(iters):
        # accumulate E[w w^T]-weighted normal equations per component
        acc_a = np.zeros((c, r_dim, r_dim))
        acc_b = np.zeros((c, d, r_dim))
        for stats in stats_list:
            lmat, w = _posterior(t_matrix, inv_vars, stats)
            # E[w w^T] = L^-1 + w w^T
            ww = np.linalg.inv(lmat) + np.outer(w, w)
            acc_a += stats.n[:, None, None] * ww[None, :, :]
            acc_b += stats.f[:, :, None] * w[None, None, :]
        for ci in range(c):
            t_matrix[ci] = np.linalg.solve(acc_a[ci], acc_b[ci].T).T
    return IVectorExtractor(t_matrix, ubm)


def save_extractor(path, extractor: IVectorExtractor) -> None:
    save_container(path, "tmatrix", {
        "t_matrix": extractor.t_matrix,
        "ubm_weights": extractor.ubm.weights,
        "ubm_means": extractor.ubm.means,
        "ubm_variances": extractor.ubm.variances,
    })


def load_extractor(path) -> IVectorExtractor:
    arrays, _ = load_container(path, "tmatrix")
    ubm = GmmModel(arrays["ubm_weights"], arrays["ubm_means"],
                   arrays["ubm_variances"])
    return IVectorExtractor(arrays["t_matrix"], ubm)


def save_ivectors(path, ivectors: dict[str, np.ndarray]) -> None:
    """Text archive: one 'id v1 ... vR' line per utterance, exact floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for utt_id, vec in ivectors.items():
        lines.append(utt_id + " " + " ".join(repr(float(v)) for v in vec))
    path.write_text("\n".join(lines) + "\n" if lines else "")


def load_ivectors(path) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        parts = line.split()
        out[parts[0]] = np.array([float(p) for p in parts[1:]])
    return out
