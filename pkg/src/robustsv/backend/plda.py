"""Two-covariance PLDA: latent speaker means with between- and within-
speaker covariances, trained by EM, scored as a likelihood ratio.

Generative model: speaker mean y ~ N(mu, B); observation x ~ N(y, W).
A trial's score is log p(e, t | same speaker) - log p(e, t | different),
both sides being zero-mean-coupled joint Gaussians built from (mu, B, W).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..container import load_container, save_container

log = logging.getLogger(__name__)

EIG_FLOOR_FRACTION = 1e-10


@dataclass
class PldaModel:
    mu: np.ndarray
    between_cov: np.ndarray
    within_cov: np.ndarray
    loglik_trace: list[float] = field(default_factory=list)

    def __post_init__(self):
        for name in ("between_cov", "within_cov"):
            mat = getattr(self, name)
            if not np.allclose(mat, mat.T, atol=1e-9):
                raise ValueError(f"{name} is not symmetric")

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


def _symmetrize(mat: np.ndarray) -> np.ndarray:
    return (mat + mat.T) / 2.0


def _floor_pd(mat: np.ndarray, what: str) -> np.ndarray:
    """Force symmetric positive definiteness by flooring eigenvalues."""
    mat = _symmetrize(mat)
    vals, vecs = np.linalg.eigh(mat)
    floor = max(EIG_FLOOR_FRACTION * float(vals.max()), 1e-12)
    if float(vals.min()) < floor:
        log.warning("flooring %d eigenvalue(s) of %s",
                    int(np.sum(vals < floor)), what)
        vals = np.maximum(vals, floor)
        mat = (vecs * vals) @ vecs.T
    return _symmetrize(mat)


def _group_by_speaker(vectors: np.ndarray, labels: list[str]):
    order: dict[str, list[int]] = {}
    for i, lab in enumerate(labels):
        order.setdefault(lab, []).append(i)
    return {lab: vectors[idx] for lab, idx in order.items()}


def _marginal_loglik(groups, mu, b_cov, w_cov) -> float:
    """Exact log p(data | mu, B, W) summed over speakers.

    For a speaker with n sessions the stacked covariance has the n-1
    within-only contrast directions and one mean direction with W + nB,
    giving (n-1)log|W| + log|W+nB| and a split quadratic form.
    """
    dim = mu.shape[0]
    sign_w, logdet_w = np.linalg.slogdet(w_cov)
    assert sign_w > 0
    w_chol = cho_factor(w_cov)
    cache: dict[int, tuple] = {}
    total = 0.0
    for grp in groups.values():
        n = grp.shape[0]
        if n not in cache:
            mean_cov = w_cov + n * b_cov
            sign_m, logdet_m = np.linalg.slogdet(mean_cov)
            assert sign_m > 0
            cache[n] = (cho_factor(mean_cov), logdet_m)
        mean_chol, logdet_m = cache[n]
        xbar = grp.mean(axis=0)
        centered = grp - xbar
        scatter_term = float(np.sum(centered * cho_solve(w_chol, centered.T).T))
        diff = xbar - mu
        mean_term = n * float(diff @ cho_solve(mean_chol, diff))
        total += -0.5 * (n * dim * np.log(2.0 * np.pi)
                         + (n - 1) * logdet_w + logdet_m
                         + scatter_term + mean_term)
    return total


def train_plda(vectors: np.ndarray, labels: list[str], iters: int = 20
               ) -> PldaModel:
    """EM over latent speaker means; loglik_trace[i] is the marginal
    log-likelihood under the parameters entering iteration i."""
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.shape[0] != len(labels):
        raise ValueError("one label per vector required")
    groups = _group_by_speaker(vectors, labels)
    if len(groups) < 2:
        raise ValueError("need at least two speakers")
    if not any(g.shape[0] >= 2 for g in groups.values()):
        raise ValueError("need repeated sessions to separate covariances")
    dim = vectors.shape[1]

    mu = vectors.mean(axis=0)
    b_cov = np.zeros((dim, dim))
    w_cov = np.zeros((dim, dim))
    n_total = 0
    for grp in groups.values():
        gm = grp.mean(axis=0)
        b_cov += np.outer(gm - mu, gm - mu)
        centered = grp - gm
        w_cov += centered.T @ centered
        n_total += grp.shape[0]
    b_cov = _floor_pd(b_cov / len(groups), "between covariance (init)")
    w_cov = _floor_pd(w_cov / n_total, "within covariance (init)")

    trace = []
    for _ in range(iters):
        trace.append(_marginal_loglik(groups, mu, b_cov, w_cov))
        b_inv = np.linalg.inv(b_cov)
        w_inv = np.linalg.inv(w_cov)
        post_means = {}
        post_covs = {}
        for lab, grp in groups.items():
            n = grp.shape[0]
            prec = b_inv + n * w_inv
            cov = np.linalg.inv(prec)
            post_covs[lab] = cov
            post_means[lab] = cov @ (b_inv @ mu + w_inv @ (n * grp.mean(axis=0)))
        mu = np.mean([post_means[lab] for lab in groups], axis=0)
        b_new = np.zeros((dim, dim))
        w_new = np.zeros((dim, dim))
        for lab, grp in groups.items():
            diff = post_means[lab] - mu
            b_new += post_covs[lab] + np.outer(diff, diff)
            resid = grp - post_means[lab]
            w_new += resid.T @ resid + grp.shape[0] * post_covs[lab]
        b_cov = _floor_pd(b_new / len(groups), "between covariance")
        w_cov = _floor_pd(w_new / n_total, "within covariance")
    return PldaModel(mu, b_cov, w_cov, trace)


class PldaScorer:
    """Precomputed factorizations for scoring many trials with one model."""

    def __init__(self, model: PldaModel):
        self.mu = model.mu
        total = model.within_cov + model.between_cov
        dim = model.dim
        joint = np.block([[total, model.between_cov],
                          [model.between_cov, total]])
        self._single_chol = cho_factor(total)
        self._joint_chol = cho_factor(joint)
        _, self._single_logdet = np.linalg.slogdet(total)
        _, self._joint_logdet = np.linalg.slogdet(joint)
        self._dim = dim

    def _logpdf_single(self, v: np.ndarray) -> float:
        d = v - self.mu
        return -0.5 * (self._dim * np.log(2 * np.pi) + self._single_logdet
                       + float(d @ cho_solve(self._single_chol, d)))

    def score(self, enroll: np.ndarray, test: np.ndarray) -> float:
        d = np.concatenate([enroll - self.mu, test - self.mu])
        log_same = -0.5 * (2 * self._dim * np.log(2 * np.pi)
                           + self._joint_logdet
                           + float(d @ cho_solve(self._joint_chol, d)))
        log_diff = self._logpdf_single(enroll) + self._logpdf_single(test)
        return log_same - log_diff


def plda_score(model: PldaModel, enroll: np.ndarray, test: np.ndarray) -> float:
    """Log-likelihood ratio for one trial (build a PldaScorer for batches)."""
    return PldaScorer(model).score(enroll, test)


def save_plda(path, model: PldaModel) -> None:
    save_container(path, "plda", {
        "mu": model.mu, "between_cov": model.between_cov,
        "within_cov": model.within_cov,
        "loglik_trace": np.asarray(model.loglik_trace),
    })


def load_plda(path) -> PldaModel:
    arrays, _ = load_container(path, "plda")
    return PldaModel(arrays["mu"], arrays["between_cov"],
                     arrays["within_cov"], list(arrays["loglik_trace"]))
