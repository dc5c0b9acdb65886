"""Stage orchestration: from synthetic data to the final EER table.

Stages run in a fixed dependency order, each writing its outputs and a
hash-chained manifest under <work>/stages/<name>. A completed stage with
unchanged seed/config/parents is skipped (idempotence); a stage whose
upstream manifest changed underneath it refuses to run as stale.

Four system regimes are evaluated: baseline, ae (enhancement applied to
all audio), mc (multi-condition LDA/PLDA lists), and ae_mc (both). The
UBM and total-variability matrix are trained per enhancement state; LDA
and PLDA are trained per regime.
"""

from __future__ import annotations

import shutil
from pathlib import Path

import numpy as np

from .audio import AudioSignal, read_wav, write_wav
from .backend.gmm import bw_stats, load_gmm, save_gmm, train_ubm
from .backend.ivector import (
    extract_ivector,
    load_extractor,
    load_ivectors,
    save_extractor,
    save_ivectors,
    train_tmatrix,
)
from .backend.lda import LdaTransform, apply_lda, train_lda
from .backend.norms import global_mean, normalize
from .backend.plda import PldaModel, train_plda
from .config import EVAL_SNR_RANGES, ExperimentConfig, config_snapshot
from .container import load_container, save_container
from .corpus import build_corpus
from .corruption.mix import CorruptionRecipe, corrupt, save_recipes
from .corruption.noise import NoiseSample, build_noise_pool
from .corruption.rir import (
    RirPair,
    load_rir_pool,
    load_room_manifest,
    random_room,
    rir_pair,
    save_rir_pool,
    save_room_manifest,
)
from .enhancement.dataset import build_enhancer_set
from .enhancement.enhance import enhance_waveform
from .enhancement.mlp import load_mlp, save_mlp, train_mlp
from .evaluation import (
    ConditionSpec,
    Trial,
    TrialSet,
    build_condition,
    eer_from_scoreset,
    load_scores,
    save_scores,
    save_trials,
    score_trials,
)
from .features import extract_features, read_feature_archive, write_feature_archive
from .manifest import (
    StageManifest,
    collect_output_files,
    hash_stage_outputs,
    load_manifest,
    manifest_file_hash,
    stage_dir,
    stage_is_fresh,
    verify_chain,
    write_manifest,
)
from .seeding import derive_seed
from .spectral import stft

SAMPLE_RATE = 8000

STAGE_ORDER = (
    "synth-data", "corrupt", "train-ae", "enhance", "features",
    "train-backend", "ivectors", "score", "eer",
)

STAGE_PARENTS = {
    "synth-data": (),
    "corrupt": ("synth-data",),
    "train-ae": ("corrupt",),
    "enhance": ("train-ae", "corrupt"),
    "features": ("enhance", "corrupt"),
    "train-backend": ("features", "synth-data"),
    "ivectors": ("train-backend", "features"),
    "score": ("ivectors", "train-backend", "synth-data"),
    "eer": ("score",),
}


def eval_conditions(seed: int) -> list[ConditionSpec]:
    """The corrupted evaluation suite: clean-telephone, noise at three SNR
    ranges, reverberation, and their combinations."""
    specs = [ConditionSpec("tel", "none", None,
                           derive_seed(seed, "cond", "tel"))]
    for lo, hi in EVAL_SNR_RANGES:
        name = f"noi-{int(lo)}-{int(hi)}"
        specs.append(ConditionSpec(name, "none", (lo, hi),
                                   derive_seed(seed, "cond", name)))
    specs.append(ConditionSpec("rev", "artificial", None,
                               derive_seed(seed, "cond", "rev")))
    for lo, hi in EVAL_SNR_RANGES:
        name = f"rev-noi-{int(lo)}-{int(hi)}"
        specs.append(ConditionSpec(name, "artificial", (lo, hi),
                                   derive_seed(seed, "cond", name)))
    return specs


def write_audio_dir(path: Path, signals: dict[str, AudioSignal]) -> None:
    path.mkdir(parents=True, exist_ok=True)
    for utt_id in sorted(signals):
        write_wav(path / f"{utt_id}.wav", signals[utt_id])


def load_audio_dir(path: Path) -> dict[str, AudioSignal]:
    out = {}
    for wav in sorted(Path(path).glob("*.wav")):
        out[wav.stem] = read_wav(wav, SAMPLE_RATE)
    return out


def write_speaker_map(path: Path, speakers: dict[str, str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{utt} {spk}" for utt, spk in sorted(speakers.items())]
    path.write_text("".join(line + "\n" for line in lines))


def read_speaker_map(path: Path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            utt, spk = line.split()
            out[utt] = spk
    return out


def save_noise_pool(path: Path, pool: list[NoiseSample]) -> None:
    path.mkdir(parents=True, exist_ok=True)
    lines = []
    for sample in pool:
        write_wav(path / f"{sample.noise_id}.wav", sample.signal)
        lines.append(f"{sample.noise_id} {sample.category} {sample.split}")
    (path / "pool.txt").write_text("".join(line + "\n" for line in lines))


def load_noise_pool(path: Path, split: str | None = None) -> list[NoiseSample]:
    path = Path(path)
    pool = []
    for line in (path / "pool.txt").read_text().splitlines():
        if not line.strip():
            continue
        noise_id, category, noise_split = line.split()
        if split is not None and noise_split != split:
            continue
        pool.append(NoiseSample(noise_id, read_wav(path / f"{noise_id}.wav",
                                                   SAMPLE_RATE),
                                category, noise_split))
    return pool


def split_eval_utts(speakers: dict[str, str], n_enroll: int
                    ) -> tuple[list[str], list[str]]:
    """First n_enroll utterances of each speaker enroll; the rest test."""
    by_speaker: dict[str, list[str]] = {}
    for utt in sorted(speakers):
        by_speaker.setdefault(speakers[utt], []).append(utt)
    enroll, test = [], []
    for spk in sorted(by_speaker):
        utts = by_speaker[spk]
        enroll.extend(utts[:n_enroll])
        test.extend(utts[n_enroll:])
    return enroll, test


def build_trials(speakers: dict[str, str], enroll_ids: list[str],
                 test_ids: list[str], condition_tag: str = "") -> TrialSet:
    """Exhaustive enroll x test pairs labeled by speaker identity."""
    trials = [Trial(e, t, speakers[e] == speakers[t])
              for e in enroll_ids for t in test_ids]
    return TrialSet(tuple(trials), condition_tag)


def _mix_kind(mix: str, draw: np.random.Generator) -> str:
    """Which corruption a training copy gets under a mix policy."""
    if mix == "N":
        return "noise"
    if mix in ("AR", "RR"):
        return "reverb"
    return ("noise", "reverb", "both")[int(draw.integers(0, 3))]


def _mix_rooms(mix: str) -> str:
    return "real" if mix in ("RR", "N+RR") else "artificial"


class Experiment:
    """Runs pipeline stages against one work directory."""

    def __init__(self, config: ExperimentConfig, seed: int | None = None):
        self.cfg = config
        self.seed = config.seed if seed is None else int(seed)
        self.work = Path(config.work_dir)

    # -- regime bookkeeping ------------------------------------------------

    @property
    def needs_ae(self) -> bool:
        return any(r in ("ae", "ae_mc") for r in self.cfg.regimes)

    @property
    def needs_mc(self) -> bool:
        return any(r in ("mc", "ae_mc") for r in self.cfg.regimes)

    @property
    def needs_plain(self) -> bool:
        return any(r in ("baseline", "mc") for r in self.cfg.regimes)

    def _states(self) -> list[str]:
        states = []
        if self.needs_plain:
            states.append("plain")
        if self.needs_ae:
            states.append("enh")
        return states

    def _regime_state(self, regime: str) -> str:
        return "enh" if regime in ("ae", "ae_mc") else "plain"

    # -- stage protocol ----------------------------------------------------

    def _sdir(self, stage: str) -> Path:
        return stage_dir(self.work, stage)

    def _run_stage(self, stage: str, build) -> StageManifest:
        parents = STAGE_PARENTS[stage]
        for parent in parents:
            verify_chain(self.work, parent)
        expected = StageManifest(
            stage=stage, seed=self.seed, config=config_snapshot(self.cfg),
            inputs={},
            parents={p: manifest_file_hash(self.work, p) for p in parents})
        if stage_is_fresh(self.work, expected):
            return load_manifest(self.work, stage)
        out_dir = self._sdir(stage)
        if out_dir.exists():
            shutil.rmtree(out_dir)
        out_dir.mkdir(parents=True)
        build(out_dir)
        expected.outputs = hash_stage_outputs(
            self.work, stage, collect_output_files(self.work, stage))
        write_manifest(self.work, expected)
        return expected

    def run_stage(self, stage: str) -> StageManifest:
        builders = {
            "synth-data": self._build_synth_data,
            "corrupt": self._build_corrupt,
            "train-ae": self._build_train_ae,
            "enhance": self._build_enhance,
            "features": self._build_features,
            "train-backend": self._build_train_backend,
            "ivectors": self._build_ivectors,
            "score": self._build_score,
            "eer": self._build_eer,
        }
        if stage not in builders:
            raise ValueError(f"unknown stage {stage!r}")
        return self._run_stage(stage, builders[stage])

    def run_all(self) -> Path:
        for stage in STAGE_ORDER:
            self.run_stage(stage)
        return self.report_path()

    def report_path(self) -> Path:
        return self._sdir("eer") / "report.txt"

    # -- stage builders ------------------------------------------------------

    def _build_synth_data(self, out: Path) -> None:
        cfg = self.cfg
        for name, prefix, n_spk, n_utt in (
                ("ae", "ae", cfg.ae_speakers, cfg.ae_utts),
                ("backend", "bk", cfg.backend_speakers, cfg.backend_utts),
                ("eval", "ev", cfg.eval_speakers, cfg.eval_utts)):
            signals, speakers = build_corpus(
                n_spk, n_utt, cfg.utt_duration_s,
                derive_seed(self.seed, f"{name}-corpus"), prefix=prefix)
            write_audio_dir(out / "audio" / name, signals)
            write_speaker_map(out / "lists" / f"{name}_speakers.txt", speakers)

        babble, _ = build_corpus(
            cfg.babble_speakers, 1, max(3.0, cfg.utt_duration_s),
            derive_seed(self.seed, "babble-corpus"), prefix="bb")
        pool = build_noise_pool(
            {"train": cfg.noise_train, "dev": cfg.noise_dev,
             "test": cfg.noise_test},
            cfg.noise_duration_s, SAMPLE_RATE,
            babble_speech=[babble[k] for k in sorted(babble)],
            babble_k=cfg.babble_k, seed=derive_seed(self.seed, "noise-pool"))
        save_noise_pool(out / "noises", pool)

        rng_art = np.random.default_rng(derive_seed(self.seed, "rooms-art"))
        art = [random_room(f"art{u:03d}", rng_art)
               for u in range(cfg.rooms_art_train + cfg.rooms_art_test)]
        save_room_manifest(out / "rooms_art_train.txt",
                           art[:cfg.rooms_art_train])
        save_room_manifest(out / "rooms_art_test.txt",
                           art[cfg.rooms_art_train:])

        # measured-style pool: a different room family, stored as WAV pairs
        # and re-ingested through the file path like real recordings
        rng_real = np.random.default_rng(derive_seed(self.seed, "rooms-real"))
        real = [rir_pair(random_room(
                    f"real{u:03d}", rng_real,
                    dims_range=((3.0, 10.0), (3.0, 10.0), (2.4, 4.5)),
                    reflection_range=(0.45, 0.9), max_order=12), SAMPLE_RATE)
                for u in range(cfg.rooms_real_train + cfg.rooms_real_test)]
        save_rir_pool(out / "real_rirs_train", real[:cfg.rooms_real_train])
        save_rir_pool(out / "real_rirs_test", real[cfg.rooms_real_train:])

    # pool loaders used by later stages -------------------------------------

    def _synth(self) -> Path:
        return self._sdir("synth-data")

    def _art_pairs(self, split: str) -> list[RirPair]:
        rooms = load_room_manifest(self._synth() / f"rooms_art_{split}.txt")
        return [rir_pair(room, SAMPLE_RATE) for room in rooms]

    def _real_pairs(self, split: str) -> list[RirPair]:
        return load_rir_pool(self._synth() / f"real_rirs_{split}", SAMPLE_RATE)

    def _corrupt_copy(self, signal: AudioSignal, copy_id: str, mix: str,
                      tag: str, noises: list[NoiseSample],
                      rooms: list[RirPair]) -> tuple[AudioSignal, CorruptionRecipe]:
        cfg = self.cfg
        draw = np.random.default_rng(derive_seed(self.seed, tag, copy_id))
        kind = _mix_kind(mix, draw)
        pair = None
        noise = None
        noise_id = None
        snr = None
        if kind in ("reverb", "both"):
            pair = rooms[int(draw.integers(0, len(rooms)))]
        if kind in ("noise", "both"):
            sample = noises[int(draw.integers(0, len(noises)))]
            noise = sample.signal
            noise_id = sample.noise_id
            snr = float(draw.uniform(cfg.train_snr_lo_db, cfg.train_snr_hi_db))
        crop_seed = derive_seed(self.seed, tag, copy_id, "crop")
        result = corrupt(signal, rir_pair=pair, noise=noise, target_snr_db=snr,
                         rng=np.random.default_rng(crop_seed))
        recipe = CorruptionRecipe(copy_id, noise_id,
                                  pair.room_id if pair else None,
                                  snr, crop_seed)
        return result.output, recipe

    def _build_corrupt(self, out: Path) -> None:
        cfg = self.cfg
        synth = self._synth()
        noise_test = load_noise_pool(synth / "noises", "test")
        art_test = self._art_pairs("test")

        # evaluation conditions over the test utterances; enrollment audio
        # passes the identity (telephone-only) path
        eval_signals = load_audio_dir(synth / "audio" / "eval")
        speakers = read_speaker_map(synth / "lists" / "eval_speakers.txt")
        enroll_ids, test_ids = split_eval_utts(speakers, cfg.eval_enroll_utts)
        enroll_corpus = {u: eval_signals[u] for u in enroll_ids}
        test_corpus = {u: eval_signals[u] for u in test_ids}

        enroll_spec = ConditionSpec("enroll", "none", None,
                                    derive_seed(self.seed, "cond", "enroll"))
        corrupted, recipes = build_condition(enroll_corpus, enroll_spec,
                                             None, None)
        write_audio_dir(out / "eval" / "enroll", corrupted)
        save_recipes(out / "recipes" / "eval_enroll.txt", recipes)
        for spec in eval_conditions(self.seed):
            corrupted, recipes = build_condition(test_corpus, spec,
                                                 noise_test, art_test)
            write_audio_dir(out / "eval" / spec.name, corrupted)
            save_recipes(out / "recipes" / f"eval_{spec.name}.txt", recipes)

        # backend training audio through the telephone channel
        backend = load_audio_dir(synth / "audio" / "backend")
        backend_tel = {u: corrupt(s).output for u, s in backend.items()}
        write_audio_dir(out / "backend" / "tel", backend_tel)

        noise_train = load_noise_pool(synth / "noises", "train")
        if self.needs_mc:
            rooms = (self._real_pairs("train")
                     if _mix_rooms(cfg.mc_mix) == "real"
                     else self._art_pairs("train"))
            utts = sorted(backend)
            n_copies = max(1, int(round(cfg.mc_fraction * len(utts))))
            pick = np.random.default_rng(derive_seed(self.seed, "mc-select"))
            chosen = [utts[int(i)] for i in
                      pick.choice(len(utts), size=n_copies,
                                  replace=n_copies > len(utts))]
            signals = {}
            recipes = []
            for i, utt in enumerate(chosen):
                copy_id = f"{utt}__m{i:03d}"
                sig, recipe = self._corrupt_copy(
                    backend[utt], copy_id, cfg.mc_mix, "mc-corr",
                    noise_train, rooms)
                signals[copy_id] = sig
                recipes.append(recipe)
            write_audio_dir(out / "backend" / "mc", signals)
            save_recipes(out / "recipes" / "backend_mc.txt", recipes)

        if self.needs_ae:
            ae_clean = load_audio_dir(synth / "audio" / "ae")
            write_audio_dir(out / "ae" / "clean",
                            {u: corrupt(s).output for u, s in ae_clean.items()})
            rooms = (self._real_pairs("train")
                     if _mix_rooms(cfg.ae_mix) == "real"
                     else self._art_pairs("train"))
            signals = {}
            recipes = []
            for utt in sorted(ae_clean):
                for i in range(cfg.ae_copies_per_utt):
                    copy_id = f"{utt}__c{i:02d}"
                    sig, recipe = self._corrupt_copy(
                        ae_clean[utt], copy_id, cfg.ae_mix, "ae-corr",
                        noise_train, rooms)
                    signals[copy_id] = sig
                    recipes.append(recipe)
            write_audio_dir(out / "ae" / "corr", signals)
            save_recipes(out / "recipes" / "ae_corr.txt", recipes)

    def _build_train_ae(self, out: Path) -> None:
        if not self.needs_ae:
            (out / "status.txt").write_text(
                "skipped: no enhancement regime requested\n")
            return
        cfg = self.cfg
        corrupt_dir = self._sdir("corrupt")
        clean = load_audio_dir(corrupt_dir / "ae" / "clean")
        corr = load_audio_dir(corrupt_dir / "ae" / "corr")
        pairs = []
        for copy_id in sorted(corr):
            source = copy_id.split("__")[0]
            pairs.append((stft(corr[copy_id]), stft(clean[source])))
        # each clean utterance is also its own target, so the learned
        # correction dies out on input that is already clean
        pairs.extend((stft(clean[u]),) * 2 for u in sorted(clean))
        x, y = build_enhancer_set(pairs, frame_stride=cfg.ae_frame_stride)
        # the stacked set is the dominant allocation; release the audio and
        # spectrograms before the optimizer makes its working copies
        del pairs, clean, corr
        model = train_mlp(
            x, y, hidden=cfg.ae_hidden, activation=cfg.ae_activation,
            learning_rate=cfg.ae_learning_rate, momentum=cfg.ae_momentum,
            batch_size=cfg.ae_batch_size, epochs=cfg.ae_epochs,
            seed=derive_seed(self.seed, "ae-train"))
        save_mlp(out / "ae_model.rsv", model)
        (out / "loss_trace.txt").write_text(
            "".join(repr(v) + "\n" for v in model.loss_trace))
        (out / "status.txt").write_text("trained\n")

    def _build_enhance(self, out: Path) -> None:
        if not self.needs_ae:
            (out / "status.txt").write_text(
                "skipped: no enhancement regime requested\n")
            return
        model = load_mlp(self._sdir("train-ae") / "ae_model.rsv")
        corrupt_dir = self._sdir("corrupt")

        def enhance_dir(src: Path, dst: Path) -> None:
            signals = load_audio_dir(src)
            write_audio_dir(dst, {u: enhance_waveform(model, s)
                                  for u, s in signals.items()})

        enhance_dir(corrupt_dir / "backend" / "tel", out / "backend_tel_enh")
        if "ae_mc" in self.cfg.regimes:
            enhance_dir(corrupt_dir / "backend" / "mc", out / "backend_mc_enh")
        enhance_dir(corrupt_dir / "eval" / "enroll", out / "eval_enroll_enh")
        for spec in eval_conditions(self.seed):
            enhance_dir(corrupt_dir / "eval" / spec.name,
                        out / f"eval_{spec.name}_enh")

    def _feature_sets(self) -> dict[str, tuple[str, str]]:
        """Archive name -> (stage, relative audio dir) for requested regimes."""
        sets: dict[str, tuple[str, str]] = {}
        if self.needs_plain:
            sets["backend_tel"] = ("corrupt", "backend/tel")
            sets["eval_enroll"] = ("corrupt", "eval/enroll")
            for spec in eval_conditions(self.seed):
                sets[f"eval_{spec.name}"] = ("corrupt", f"eval/{spec.name}")
        if "mc" in self.cfg.regimes:
            sets["backend_mc"] = ("corrupt", "backend/mc")
        if self.needs_ae:
            sets["backend_tel_enh"] = ("enhance", "backend_tel_enh")
            sets["eval_enroll_enh"] = ("enhance", "eval_enroll_enh")
            for spec in eval_conditions(self.seed):
                sets[f"eval_{spec.name}_enh"] = ("enhance",
                                                 f"eval_{spec.name}_enh")
        if "ae_mc" in self.cfg.regimes:
            sets["backend_mc_enh"] = ("enhance", "backend_mc_enh")
        return sets

    def _build_features(self, out: Path) -> None:
        for name, (stage, rel) in sorted(self._feature_sets().items()):
            signals = load_audio_dir(self._sdir(stage) / rel)
            feats = {u: extract_features(signals[u], u).frames
                     for u in sorted(signals)}
            write_feature_archive(out / f"{name}.fa", feats)

    def _archive(self, name: str) -> dict[str, np.ndarray]:
        return read_feature_archive(self._sdir("features") / f"{name}.fa")

    def _build_train_backend(self, out: Path) -> None:
        cfg = self.cfg
        speakers = read_speaker_map(
            self._synth() / "lists" / "backend_speakers.txt")

        def speaker_of(utt_or_copy: str) -> str:
            return speakers[utt_or_copy.split("__")[0]]

        for state in self._states():
            suffix = "_enh" if state == "enh" else ""
            base = self._archive(f"backend_tel{suffix}")
            pooled = np.concatenate([base[u] for u in sorted(base)])
            ubm = train_ubm(pooled, cfg.ubm_components, cfg.ubm_iters,
                            derive_seed(self.seed, "ubm", state))
            save_gmm(out / f"ubm_{state}.rsv", ubm)
            stats = {u: bw_stats(base[u], ubm) for u in sorted(base)}
            extractor = train_tmatrix(
                [stats[u] for u in sorted(stats)], ubm, cfg.ivector_dim,
                cfg.tmatrix_iters, derive_seed(self.seed, "tmatrix", state))
            save_extractor(out / f"tmatrix_{state}.rsv", extractor)

            ivectors = {u: extract_ivector(extractor, stats[u])
                        for u in sorted(stats)}
            mc_name = f"backend_mc{suffix}"
            mc_ivectors = dict(ivectors)
            if (self._sdir("features") / f"{mc_name}.fa").exists():
                mc_arch = self._archive(mc_name)
                for u in sorted(mc_arch):
                    mc_ivectors[u] = extract_ivector(
                        extractor, bw_stats(mc_arch[u], ubm))

            for regime in cfg.regimes:
                if self._regime_state(regime) != state:
                    continue
                vectors_map = (mc_ivectors if regime in ("mc", "ae_mc")
                               else ivectors)
                ids = sorted(vectors_map)
                vecs = np.stack([vectors_map[u] for u in ids])
                labels = [speaker_of(u) for u in ids]
                lda = train_lda(vecs, labels, cfg.lda_dim)
                projected = apply_lda(lda, vecs)
                mean = global_mean(projected)
                normed = normalize(projected, mean)
                plda = train_plda(normed, labels, cfg.plda_iters)
                save_container(out / f"bundle_{regime}.rsv", "backend-bundle", {
                    "lda": lda.projection, "mean": mean,
                    "plda_mu": plda.mu, "plda_between": plda.between_cov,
                    "plda_within": plda.within_cov,
                    "plda_loglik_trace": np.asarray(plda.loglik_trace),
                }, {"regime": regime, "state": state})

    def load_bundle(self, regime: str):
        arrays, _ = load_container(
            self._sdir("train-backend") / f"bundle_{regime}.rsv",
            "backend-bundle")
        lda = LdaTransform(arrays["lda"])
        plda = PldaModel(arrays["plda_mu"], arrays["plda_between"],
                         arrays["plda_within"],
                         list(arrays["plda_loglik_trace"]))
        return lda, arrays["mean"], plda

    def _build_ivectors(self, out: Path) -> None:
        for state in self._states():
            suffix = "_enh" if state == "enh" else ""
            backend_dir = self._sdir("train-backend")
            ubm = load_gmm(backend_dir / f"ubm_{state}.rsv")
            extractor = load_extractor(backend_dir / f"tmatrix_{state}.rsv")
            names = ["eval_enroll"] + [f"eval_{s.name}"
                                       for s in eval_conditions(self.seed)]
            for name in names:
                arch = self._archive(f"{name}{suffix}")
                ivectors = {
                    u: extract_ivector(extractor, bw_stats(arch[u], ubm))
                    for u in sorted(arch)}
                save_ivectors(out / f"{name}_{state}.txt", ivectors)

    def _build_score(self, out: Path) -> None:
        cfg = self.cfg
        speakers = read_speaker_map(
            self._synth() / "lists" / "eval_speakers.txt")
        enroll_ids, test_ids = split_eval_utts(speakers, cfg.eval_enroll_utts)
        trials = build_trials(speakers, enroll_ids, test_ids)
        save_trials(out / "trials.txt", trials)

        iv_dir = self._sdir("ivectors")
        for regime in cfg.regimes:
            state = self._regime_state(regime)
            lda, mean, plda = self.load_bundle(regime)

            def project(raw: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
                ids = sorted(raw)
                mat = normalize(apply_lda(lda, np.stack([raw[u] for u in ids])),
                                mean)
                return dict(zip(ids, mat))

            enroll_iv = project(
                load_ivectors(iv_dir / f"eval_enroll_{state}.txt"))
            for spec in eval_conditions(self.seed):
                test_iv = project(
                    load_ivectors(iv_dir / f"eval_{spec.name}_{state}.txt"))
                merged = {**enroll_iv, **test_iv}
                tagged = TrialSet(trials.trials, spec.name)
                score_set = score_trials(tagged, merged, plda)
                save_scores(out / "scores" / f"{spec.name}__{regime}.txt",
                            score_set)

    def _build_eer(self, out: Path) -> None:
        cfg = self.cfg
        score_dir = self._sdir("score") / "scores"
        conditions = [s.name for s in eval_conditions(self.seed)]
        table: dict[tuple[str, str], float] = {}
        lines = []
        for cond in conditions:
            for regime in cfg.regimes:
                score_set = load_scores(score_dir / f"{cond}__{regime}.txt",
                                        cond)
                result = eer_from_scoreset(score_set)
                table[(cond, regime)] = result.eer_percent
                lines.append(f"{cond} {regime} {result.eer_percent:.6f} "
                             f"{repr(result.threshold)}")
        (out / "eer.tsv").write_text("".join(line + "\n" for line in lines))

        width = max(len(c) for c in conditions) + 2
        header = "condition".ljust(width) + "".join(
            r.rjust(12) for r in cfg.regimes)
        rows = [header, "-" * len(header)]
        for cond in conditions:
            row = cond.ljust(width) + "".join(
                f"{table[(cond, regime)]:12.3f}" for regime in cfg.regimes)
            rows.append(row)
        (out / "report.txt").write_text("".join(r + "\n" for r in rows))


def load_eer_table(work_dir) -> dict[tuple[str, str], float]:
    """Parse eer.tsv into {(condition, regime): eer_percent}."""
    table = {}
    path = stage_dir(work_dir, "eer") / "eer.tsv"
    for line in Path(path).read_text().splitlines():
        if line.strip():
            cond, regime, eer, _thr = line.split()
            table[(cond, regime)] = float(eer)
    return table
