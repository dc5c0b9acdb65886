"""Experiment configuration: an INI file over dataclass defaults.

Every knob has a desk-scale default so `run-experiment` works with no
config file at all; full-scale values (2048 mixture components, 600-dim
i-vectors, 200-dim LDA, 3x1500 hidden units) remain valid settings.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields
from pathlib import Path

AE_MIXES = ("N", "AR", "N+AR", "RR", "N+RR")
REGIMES = ("baseline", "ae", "mc", "ae_mc")
EVAL_SNR_RANGES = ((0.0, 7.0), (7.0, 14.0), (14.0, 21.0))


class ConfigError(Exception):
    """Invalid or unreadable configuration."""


@dataclass
class ExperimentConfig:
    # [paths]
    work_dir: str = "work"

    # [corpus] synthetic speech sizes
    ae_speakers: int = 24
    ae_utts: int = 6
    backend_speakers: int = 40
    backend_utts: int = 8
    eval_speakers: int = 20
    eval_utts: int = 8
    eval_enroll_utts: int = 3
    babble_speakers: int = 8
    utt_duration_s: float = 4.0

    # [pools] noise and room pool sizes (train/dev/test disjoint)
    noise_train: int = 20
    noise_dev: int = 4
    noise_test: int = 4
    noise_duration_s: float = 6.0
    babble_k: int = 4
    rooms_art_train: int = 30
    rooms_art_test: int = 6
    rooms_real_train: int = 10
    rooms_real_test: int = 4

    # [corruption]
    train_snr_lo_db: float = 0.0
    train_snr_hi_db: float = 21.0
    ae_copies_per_utt: int = 3
    mc_fraction: float = 0.3
    mc_mix: str = "N+AR"

    # [autoencoder]
    ae_mix: str = "N+RR"
    ae_hidden: tuple[int, ...] = (128,)
    ae_activation: str = "tanh"
    ae_learning_rate: float = 0.01
    ae_momentum: float = 0.9
    ae_batch_size: int = 128
    ae_epochs: int = 60
    ae_frame_stride: int = 3

    # [backend]
    ubm_components: int = 64
    ivector_dim: int = 50
    lda_dim: int = 20
    ubm_iters: int = 20
    tmatrix_iters: int = 10
    plda_iters: int = 20

    # [experiment]
    seed: int = 1234
    regimes: tuple[str, ...] = ("baseline", "ae", "mc", "ae_mc")

    def validate(self) -> None:
        positive_ints = [
            "ae_speakers", "ae_utts", "backend_speakers", "backend_utts",
            "eval_speakers", "eval_utts", "eval_enroll_utts",
            "babble_speakers", "noise_train", "noise_test", "babble_k",
            "rooms_art_train", "rooms_art_test", "rooms_real_train",
            "rooms_real_test", "ae_copies_per_utt", "ae_batch_size",
            "ae_epochs", "ae_frame_stride", "ubm_components", "ivector_dim",
            "lda_dim", "ubm_iters", "tmatrix_iters", "plda_iters",
        ]
        for name in positive_ints:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.noise_dev < 0:
            raise ConfigError("noise_dev must be >= 0")
        if self.eval_enroll_utts >= self.eval_utts:
            raise ConfigError("eval_enroll_utts must leave test utterances")
        if self.ae_mix not in AE_MIXES:
            raise ConfigError(f"ae_mix must be one of {AE_MIXES}")
        if self.mc_mix not in AE_MIXES:
            raise ConfigError(f"mc_mix must be one of {AE_MIXES}")
        for regime in self.regimes:
            if regime not in REGIMES:
                raise ConfigError(f"unknown regime {regime!r}")
        if not self.regimes:
            raise ConfigError("at least one regime required")
        if self.ae_activation not in ("tanh", "logistic"):
            raise ConfigError("ae_activation must be tanh or logistic")
        if self.train_snr_hi_db < self.train_snr_lo_db:
            raise ConfigError("empty training SNR range")
        if not 0.0 <= self.mc_fraction <= 1.0:
            raise ConfigError("mc_fraction must be in [0, 1]")
        if self.lda_dim > self.ivector_dim:
            raise ConfigError("lda_dim cannot exceed ivector_dim")
        if not all(h >= 1 for h in self.ae_hidden):
            raise ConfigError("ae_hidden sizes must be >= 1")

    def section_dict(self, names: list[str]) -> dict:
        """Subset of fields as plain JSON-able values (manifest snapshots)."""
        out = {}
        for name in names:
            value = getattr(self, name)
            out[name] = list(value) if isinstance(value, tuple) else value
        return out


_SECTIONS = {
    "paths": ["work_dir"],
    "corpus": ["ae_speakers", "ae_utts", "backend_speakers", "backend_utts",
               "eval_speakers", "eval_utts", "eval_enroll_utts",
               "babble_speakers", "utt_duration_s"],
    "pools": ["noise_train", "noise_dev", "noise_test", "noise_duration_s",
              "babble_k", "rooms_art_train", "rooms_art_test",
              "rooms_real_train", "rooms_real_test"],
    "corruption": ["train_snr_lo_db", "train_snr_hi_db", "ae_copies_per_utt",
                   "mc_fraction", "mc_mix"],
    "autoencoder": ["ae_mix", "ae_hidden", "ae_activation",
                    "ae_learning_rate", "ae_momentum", "ae_batch_size",
                    "ae_epochs", "ae_frame_stride"],
    "backend": ["ubm_components", "ivector_dim", "lda_dim", "ubm_iters",
                "tmatrix_iters", "plda_iters"],
    "experiment": ["seed", "regimes"],
}


def _parse_value(name: str, text: str, default):
    try:
        if isinstance(default, bool):
            return text.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            items = [p.strip() for p in text.split(",") if p.strip()]
            if default and isinstance(default[0], int):
                return tuple(int(p) for p in items)
            return tuple(items)
        return text.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def load_config(path=None) -> ExperimentConfig:
    """Defaults overridden by an INI file (unknown keys are errors)."""
    config = ExperimentConfig()
    if path is None:
        config.validate()
        return config
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read_string(path.read_text())
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    known = {name: section for section, names in _SECTIONS.items()
             for name in names}
    defaults = {f.name: getattr(config, f.name) for f in fields(config)}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for name, text in parser.items(section):
            if name not in known or known[name] != section:
                raise ConfigError(f"unknown key {name!r} in [{section}]")
            setattr(config, name, _parse_value(name, text, defaults[name]))
    config.validate()
    return config


def config_to_ini(config: ExperimentConfig) -> str:
    """Effective configuration as INI text (the print-config output)."""
    parser = configparser.ConfigParser()
    for section, names in _SECTIONS.items():
        parser[section] = {}
        for name in names:
            value = getattr(config, name)
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            parser[section][name] = str(value)
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def config_snapshot(config: ExperimentConfig) -> dict:
    """Whole config as a JSON-able dict (manifest embedding)."""
    out = {}
    for f in fields(config):
        value = getattr(config, f.name)
        out[f.name] = list(value) if isinstance(value, tuple) else value
    return out
