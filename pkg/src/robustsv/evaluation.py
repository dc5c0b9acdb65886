"""Corrupted evaluation conditions, trial scoring, and equal error rate."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import AudioSignal
from .backend.plda import PldaModel, PldaScorer
from .corruption.mix import CorruptionRecipe, corrupt
from .corruption.noise import NoiseSample
from .corruption.rir import RirPair
from .seeding import derive_seed

REVERB_KINDS = ("none", "artificial", "real")


@dataclass(frozen=True)
class Trial:
    enroll_id: str
    test_id: str
    target: bool


@dataclass(frozen=True)
class TrialSet:
    trials: tuple[Trial, ...]
    condition_tag: str = ""

    def __post_init__(self):
        pairs = [(t.enroll_id, t.test_id) for t in self.trials]
        if len(set(pairs)) != len(pairs):
            raise ValueError("duplicate (enroll, test) pairs in trial set")

    def __len__(self) -> int:
        return len(self.trials)


@dataclass(frozen=True)
class ConditionSpec:
    """How to corrupt the clean test corpus for one evaluation condition."""

    name: str
    reverb: str = "none"
    snr_range_db: tuple[float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.reverb not in REVERB_KINDS:
            raise ValueError(f"unknown reverb kind {self.reverb!r}")
        if self.snr_range_db is not None:
            lo, hi = self.snr_range_db
            if hi < lo:
                raise ValueError("empty SNR range")


@dataclass(frozen=True)
class ScoreSet:
    trials: TrialSet
    scores: np.ndarray

    def __post_init__(self):
        if len(self.scores) != len(self.trials):
            raise ValueError("one score per trial required")
        if len(self.scores) and not np.all(np.isfinite(self.scores)):
            raise ValueError("non-finite trial scores")


@dataclass(frozen=True)
class EerResult:
    eer_percent: float
    threshold: float


def build_condition(corpus: dict[str, AudioSignal], spec: ConditionSpec,
                    noise_pool: list[NoiseSample] | None,
                    room_pairs: list[RirPair] | None,
                    ) -> tuple[dict[str, AudioSignal], list[CorruptionRecipe]]:
    """Corrupt every test utterance per the condition spec.

    Draws (room, noise, SNR, crop seed) come from seeds derived per
    utterance, so output and recipes depend only on spec.seed and ids, not
    on dict ordering. Noise pools must be the held-out test split.
    """
    wants_noise = spec.snr_range_db is not None
    wants_reverb = spec.reverb != "none"
    if wants_noise:
        if not noise_pool:
            raise ValueError("condition needs a noise pool")
        for sample in noise_pool:
            if sample.split != "test":
                raise ValueError(
                    f"noise {sample.noise_id} is split {sample.split!r}; "
                    "evaluation conditions must use the test split")
    if wants_reverb and not room_pairs:
        raise ValueError("condition needs a room pool")

    corrupted: dict[str, AudioSignal] = {}
    recipes: list[CorruptionRecipe] = []
    for utt_id in sorted(corpus):
        draw = np.random.default_rng(derive_seed(spec.seed, spec.name, utt_id))
        pair = None
        noise_sig = None
        noise_id = None
        snr = None
        if wants_reverb:
            pair = room_pairs[int(draw.integers(0, len(room_pairs)))]
        if wants_noise:
            sample = noise_pool[int(draw.integers(0, len(noise_pool)))]
            noise_sig = sample.signal
            noise_id = sample.noise_id
            lo, hi = spec.snr_range_db
            snr = float(draw.uniform(lo, hi))
        crop_seed = derive_seed(spec.seed, spec.name, utt_id, "crop")
        result = corrupt(corpus[utt_id], rir_pair=pair, noise=noise_sig,
                         target_snr_db=snr,
                         rng=np.random.default_rng(crop_seed))
        corrupted[utt_id] = result.output
        recipes.append(CorruptionRecipe(
            utt_id=utt_id, noise_id=noise_id,
            room_id=pair.room_id if pair else None,
            snr_db=snr, seed=crop_seed))
    return corrupted, recipes


def reconstruct_condition(corpus: dict[str, AudioSignal],
                          recipes: list[CorruptionRecipe],
                          noise_pool: list[NoiseSample] | None,
                          room_pairs: list[RirPair] | None,
                          ) -> dict[str, AudioSignal]:
    """Replay recipes exactly; output is bit-identical to build_condition."""
    noises = {s.noise_id: s.signal for s in (noise_pool or [])}
    rooms = {p.room_id: p for p in (room_pairs or [])}
    out: dict[str, AudioSignal] = {}
    for recipe in recipes:
        result = corrupt(
            corpus[recipe.utt_id],
            rir_pair=rooms[recipe.room_id] if recipe.room_id else None,
            noise=noises[recipe.noise_id] if recipe.noise_id else None,
            target_snr_db=recipe.snr_db,
            rng=np.random.default_rng(recipe.seed))
        out[recipe.utt_id] = result.output
    return out


def score_trials(trial_set: TrialSet, ivectors: dict[str, np.ndarray],
                 model: PldaModel) -> ScoreSet:
    """One PLDA log-likelihood ratio per trial."""
    scorer = PldaScorer(model)
    scores = np.empty(len(trial_set))
    for i, trial in enumerate(trial_set.trials):
        for key in (trial.enroll_id, trial.test_id):
            if key not in ivectors:
                raise KeyError(f"no i-vector for utterance {key!r}")
        scores[i] = scorer.score(ivectors[trial.enroll_id],
                                 ivectors[trial.test_id])
    return ScoreSet(trial_set, scores)


def compute_eer(scores: np.ndarray, labels: np.ndarray) -> EerResult:
    """EER by linear interpolation between the ROC operating points that
    bracket the false-accept = false-reject crossing.

    Accept iff score >= threshold; operating points are evaluated at every
    distinct score plus open ends.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    n_tar = int(labels.sum())
    n_non = int(labels.size - n_tar)
    if n_tar == 0 or n_non == 0:
        raise ValueError("EER needs both target and nontarget trials")

    # thresholds from below the minimum to above the maximum
    uniq = np.unique(scores)
    thresholds = np.concatenate([[uniq[0] - 1.0], uniq, [uniq[-1] + 1.0]])
    tar = np.sort(scores[labels])
    non = np.sort(scores[~labels])
    # P(nontarget >= t) and P(target < t) at each candidate threshold
    far = 1.0 - np.searchsorted(non, thresholds, side="left") / n_non
    frr = np.searchsorted(tar, thresholds, side="left") / n_tar

    diff = far - frr  # starts at 1, ends at -1, non-increasing
    k = int(np.flatnonzero(diff <= 0)[0])
    if diff[k] == 0.0:
        return EerResult(100.0 * far[k], float(thresholds[k]))
    # interpolate within the segment (k-1, k)
    d0, d1 = diff[k - 1], diff[k]
    alpha = d0 / (d0 - d1)
    eer = far[k - 1] + alpha * (far[k] - far[k - 1])
    thr = thresholds[k - 1] + alpha * (thresholds[k] - thresholds[k - 1])
    return EerResult(100.0 * float(eer), float(thr))


def eer_from_scoreset(score_set: ScoreSet) -> EerResult:
    labels = np.array([t.target for t in score_set.trials.trials])
    return compute_eer(score_set.scores, labels)


# Text formats: trials are "enroll test target|nontarget", scores append
# the value; floats use repr so files round-trip exactly.

def save_trials(path, trial_set: TrialSet) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{t.enroll_id} {t.test_id} "
             f"{'target' if t.target else 'nontarget'}"
             for t in trial_set.trials]
    path.write_text("".join(line + "\n" for line in lines))


def load_trials(path, condition_tag: str = "") -> TrialSet:
    trials = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        enroll, test, label = line.split()
        if label not in ("target", "nontarget"):
            raise ValueError(f"bad trial label {label!r}")
        trials.append(Trial(enroll, test, label == "target"))
    return TrialSet(tuple(trials), condition_tag)


def save_scores(path, score_set: ScoreSet) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for trial, score in zip(score_set.trials.trials, score_set.scores):
        label = "target" if trial.target else "nontarget"
        lines.append(f"{trial.enroll_id} {trial.test_id} {label} "
                     f"{repr(float(score))}")
    path.write_text("".join(line + "\n" for line in lines))


def load_scores(path, condition_tag: str = "") -> ScoreSet:
    trials = []
    scores = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        enroll, test, label, value = line.split()
        trials.append(Trial(enroll, test, label == "target"))
        scores.append(float(value))
    return ScoreSet(TrialSet(tuple(trials), condition_tag), np.array(scores))
