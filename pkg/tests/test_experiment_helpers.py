"""Experiment orchestration helpers that don't need a full pipeline run."""

import numpy as np
import pytest

from robustsv.corpus import build_corpus
from robustsv.corruption.noise import build_noise_pool
from robustsv.experiment import (
    STAGE_ORDER,
    STAGE_PARENTS,
    build_trials,
    eval_conditions,
    load_audio_dir,
    load_noise_pool,
    read_speaker_map,
    save_noise_pool,
    split_eval_utts,
    write_audio_dir,
    write_speaker_map,
)


def test_stage_graph_is_consistent():
    assert STAGE_ORDER[0] == "synth-data"
    assert STAGE_ORDER[-1] == "eer"
    for stage, parents in STAGE_PARENTS.items():
        assert stage in STAGE_ORDER
        for p in parents:
            # parents always run earlier in the fixed order
            assert STAGE_ORDER.index(p) < STAGE_ORDER.index(stage)


def test_eval_conditions_cover_the_grid():
    specs = eval_conditions(1234)
    names = [s.name for s in specs]
    assert names == [
        "tel", "noi-0-7", "noi-7-14", "noi-14-21",
        "rev", "rev-noi-0-7", "rev-noi-7-14", "rev-noi-14-21"]
    by_name = {s.name: s for s in specs}
    assert by_name["tel"].reverb == "none" and by_name["tel"].snr_range_db is None
    assert by_name["rev"].reverb == "artificial"
    assert by_name["rev-noi-0-7"].snr_range_db == (0.0, 7.0)
    # per-condition seeds differ
    assert len({s.seed for s in specs}) == len(specs)
    # and are stable across calls
    assert [s.seed for s in eval_conditions(1234)] == [s.seed for s in specs]


def test_split_eval_utts_per_speaker():
    speakers = {f"s{k}_u{j}": f"s{k}" for k in range(3) for j in range(4)}
    enroll, test = split_eval_utts(speakers, 1)
    assert enroll == ["s0_u0", "s1_u0", "s2_u0"]
    assert len(test) == 9
    assert set(enroll).isdisjoint(test)


def test_build_trials_exhaustive_with_labels():
    speakers = {"a_e": "a", "b_e": "b", "a_t": "a", "b_t": "b"}
    trials = build_trials(speakers, ["a_e", "b_e"], ["a_t", "b_t"], "tag")
    assert len(trials) == 4
    assert trials.condition_tag == "tag"
    labels = {(t.enroll_id, t.test_id): t.target for t in trials.trials}
    assert labels[("a_e", "a_t")] is True
    assert labels[("a_e", "b_t")] is False


def test_audio_dir_roundtrip(tmp_path):
    signals, speakers = build_corpus(2, 2, 0.5, seed=1, prefix="ad")
    write_audio_dir(tmp_path / "audio", signals)
    back = load_audio_dir(tmp_path / "audio")
    assert sorted(back) == sorted(signals)
    for utt in signals:
        assert np.max(np.abs(back[utt].samples - signals[utt].samples)) < 1e-4

    write_speaker_map(tmp_path / "speakers.txt", speakers)
    assert read_speaker_map(tmp_path / "speakers.txt") == speakers


def test_noise_pool_roundtrip_with_split_filter(tmp_path):
    babble, _ = build_corpus(3, 1, 1.2, seed=2, prefix="bb")
    pool = build_noise_pool({"train": 3, "test": 2}, 1.5, 8000,
                            list(babble.values()), 3, seed=3)
    save_noise_pool(tmp_path / "noises", pool)
    back = load_noise_pool(tmp_path / "noises")
    assert [s.noise_id for s in back] == [s.noise_id for s in pool]
    test_only = load_noise_pool(tmp_path / "noises", split="test")
    assert len(test_only) == 2
    assert all(s.split == "test" for s in test_only)
    for orig, rt in zip(pool, back):
        assert rt.category == orig.category
        assert np.max(np.abs(rt.signal.samples - orig.signal.samples)) < 1e-4
