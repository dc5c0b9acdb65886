"""Diagonal-covariance GMM background model and its sufficient statistics.

Training is EM from a binary-split initialization; the log-likelihood trace
of the final full-size EM run is kept on the model so monotonicity can be
checked. Variances are floored each M-step at a fixed fraction of the
global per-dimension variance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ..container import load_container, save_container
from ..kernels import gmm_logprob

VARIANCE_FLOOR_FRACTION = 1e-4
SPLIT_PERTURBATION = 0.2
COLLAPSE_MASS = 1.0

log = logging.getLogger(__name__)


@dataclass
class GmmModel:
    """Mixture weights plus per-component diagonal Gaussians."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    loglik_trace: list[float] = field(default_factory=list)

    def __post_init__(self):
        if abs(float(self.weights.sum()) - 1.0) > 1e-9:
            raise ValueError("mixture weights must sum to 1")
        if np.any(self.variances <= 0):
            raise ValueError("variances must be positive")

    @property
    def n_components(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]


@dataclass(frozen=True)
class BwStats:
    """Zero- and centered first-order statistics against a UBM."""

    n: np.ndarray
    f: np.ndarray


def _log_consts(weights, variances):
    dim = variances.shape[1]
    return (np.log(weights) - 0.5 * (dim * np.log(2.0 * np.pi)
                                     + np.sum(np.log(variances), axis=1)))


def weighted_log_densities(frames: np.ndarray, model: GmmModel) -> np.ndarray:
    """log(w_c N(x_t | mu_c, var_c)) for every frame/component, (T, C)."""
    if frames.shape[1] != model.dim:
        raise ValueError(
            f"feature dim {frames.shape[1]} != model dim {model.dim}")
    return gmm_logprob(frames, model.means, 1.0 / model.variances,
                       _log_consts(model.weights, model.variances))


def _e_step(frames, weights, means, variances):
    """Responsibilities and total log-likelihood."""
    lp = gmm_logprob(frames, means, 1.0 / variances,
                     _log_consts(weights, variances))
    norm = logsumexp(lp, axis=1)
    return np.exp(lp - norm[:, None]), float(norm.sum())


def _m_step(frames, resp, var_floor, rng):
    n = resp.sum(axis=0)
    collapsed = np.flatnonzero(n < COLLAPSE_MASS)
    for c in collapsed:
        # dead component: re-seed on a random frame with broad variance
        log.warning("re-seeding collapsed mixture component %d", c)
        resp[:, c] = 0.0
        resp[int(rng.integers(0, frames.shape[0])), c] = 1.0
    if collapsed.size:
        n = resp.sum(axis=0)
    weights = n / n.sum()
    means = (resp.T @ frames) / n[:, None]
    sq = (resp.T @ (frames * frames)) / n[:, None]
    variances = np.maximum(sq - means * means, var_floor[None, :])
    return weights, means, variances


def train_ubm(frames: np.ndarray, n_components: int, iters: int = 20,
              seed: int = 0) -> GmmModel:
    """Fit a diagonal GMM by binary-split initialization plus EM.

    Starting from the single global Gaussian, components are doubled by
    perturbing means along +-SPLIT_PERTURBATION standard deviations, with a
    couple of EM sweeps after each split; the final model then runs the
    full `iters` EM iterations whose log-likelihoods form loglik_trace.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2 or frames.shape[0] == 0:
        raise ValueError("need a non-empty (T, D) frame matrix")
    if frames.shape[0] < n_components:
        raise ValueError("fewer frames than mixture components")
    rng = np.random.default_rng(seed)
    global_var = np.maximum(frames.var(axis=0), 1e-12)
    var_floor = VARIANCE_FLOOR_FRACTION * global_var

    weights = np.ones(1)
    means = frames.mean(axis=0)[None, :]
    variances = np.maximum(frames.var(axis=0), var_floor)[None, :]

    while means.shape[0] < n_components:
        take = min(means.shape[0], n_components - means.shape[0])
        offset = SPLIT_PERTURBATION * np.sqrt(variances[:take])
        means = np.concatenate([means, means[:take] + offset])
        means[:take] -= offset
        variances = np.concatenate([variances, variances[:take]])
        half_w = weights[:take] / 2.0
        weights = np.concatenate([weights, half_w])
        weights[:take] = half_w
        for _ in range(2):
            resp, _ = _e_step(frames, weights, means, variances)
            weights, means, variances = _m_step(frames, resp, var_floor, rng)

    trace = []
    for _ in range(iters):
        resp, loglik = _e_step(frames, weights, means, variances)
        trace.append(loglik)
        weights, means, variances = _m_step(frames, resp, var_floor, rng)
    return GmmModel(weights, means, variances, trace)


def bw_stats(frames: np.ndarray, model: GmmModel) -> BwStats:
    """Per-component soft counts and mean-centered first-order sums."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.size == 0:
        return BwStats(np.zeros(model.n_components),
                       np.zeros((model.n_components, model.dim)))
    resp, _ = _e_step(frames, model.weights, model.means, model.variances)
    n = resp.sum(axis=0)
    f = resp.T @ frames - n[:, None] * model.means
    return BwStats(n, f)


def save_gmm(path, model: GmmModel) -> None:
    save_container(path, "gmm", {
        "weights": model.weights, "means": model.means,
        "variances": model.variances,
        "loglik_trace": np.asarray(model.loglik_trace),
    })


def load_gmm(path) -> GmmModel:
    arrays, _ = load_container(path, "gmm")
    return GmmModel(arrays["weights"], arrays["means"], arrays["variances"],
                    list(arrays["loglik_trace"]))
