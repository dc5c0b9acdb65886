"""The i-vector/PLDA recognizer: GMM-UBM, Baum-Welch statistics,
total-variability extraction, LDA, normalization, two-covariance PLDA."""

from .gmm import (
    BwStats,
    GmmModel,
    bw_stats,
    load_gmm,
    save_gmm,
    train_ubm,
    weighted_log_densities,
)
from .ivector import (
    IVectorExtractor,
    extract_ivector,
    load_extractor,
    load_ivectors,
    save_extractor,
    save_ivectors,
    train_tmatrix,
)
from .lda import LdaTransform, apply_lda, load_lda, save_lda, train_lda
from .norms import global_mean, normalize
from .plda import (
    PldaModel,
    PldaScorer,
    load_plda,
    plda_score,
    save_plda,
    train_plda,
)

__all__ = [
    "BwStats",
    "GmmModel",
    "IVectorExtractor",
    "LdaTransform",
    "PldaModel",
    "PldaScorer",
    "apply_lda",
    "bw_stats",
    "extract_ivector",
    "global_mean",
    "load_extractor",
    "load_gmm",
    "load_ivectors",
    "load_lda",
    "load_plda",
    "normalize",
    "plda_score",
    "save_extractor",
    "save_gmm",
    "save_ivectors",
    "save_lda",
    "save_plda",
    "train_lda",
    "train_plda",
    "train_tmatrix",
    "train_ubm",
    "weighted_log_densities",
]
