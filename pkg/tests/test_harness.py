"""Experiment configuration, metrics round-trip, determinism, plotting."""

import json
from dataclasses import replace
from pathlib import Path

import pytest

from feudalgain.harness import (
    ExperimentConfig,
    evaluate_checkpoint,
    plot_metrics,
    read_metrics,
    run_noise_sweep,
    train,
    train_seed,
    write_metrics,
)

FAST = dict(domain="toy_cr", env="env1", mode="feudalgain",
            train_dialogues=40, eval_every=20, eval_dialogues=10,
            seeds=(0,))


class TestExperimentConfig:
    def test_eval_cadence_must_divide_training(self):
        with pytest.raises(ValueError):
            ExperimentConfig(train_dialogues=400, eval_every=300)

    def test_requires_seeds(self):
        with pytest.raises(ValueError):
            ExperimentConfig(seeds=())

    def test_checkpoint_count(self):
        cfg = ExperimentConfig(train_dialogues=400, eval_every=200)
        points = list(range(cfg.eval_every, cfg.train_dialogues + 1,
                            cfg.eval_every))
        assert points == [200, 400]

    def test_from_file_with_overrides(self, tmp_path):
        cfg_file = tmp_path / "exp.yaml"
        cfg_file.write_text("domain: toy_sfr\nenv: env3\nseeds: [1, 2]\n",
                            encoding="utf-8")
        cfg = ExperimentConfig.from_file(cfg_file, env="env6")
        assert cfg.domain == "toy_sfr"
        assert cfg.env == "env6"
        assert cfg.seeds == (1, 2)

    def test_mode_labels(self):
        assert ExperimentConfig().mode_label() == "feudalgain"
        assert ExperimentConfig(mode="feudal-nn",
                                use_pass=False).mode_label() == \
            "feudal-nn-nopass"
        assert ExperimentConfig(use_ig=False).mode_label() == \
            "feudalgain-noig"

    def test_env_overrides(self):
        cfg = ExperimentConfig(env="env1", error_rate_override=0.3,
                               masks_override=False)
        env = cfg.env_profile()
        assert env.semantic_error_rate == 0.3
        assert not env.action_masks


class TestMetricsIo:
    def test_round_trip(self, tmp_path):
        rows = [{"seed": 0, "env": "env1", "mode": "feudalgain",
                 "checkpoint": 200, "success_rate": 0.5,
                 "avg_reward": 3.25, "avg_turns": 7.5}]
        path = tmp_path / "metrics.csv"
        write_metrics(path, rows)
        assert read_metrics(path) == rows


class TestTraining:
    def test_determinism_byte_identical(self, tmp_path):
        cfg = ExperimentConfig(**FAST, out_dir=str(tmp_path / "a"))
        path_a = train(cfg)
        path_b = train(replace(cfg, out_dir=str(tmp_path / "b")))
        assert path_a.read_bytes() == path_b.read_bytes()

    def test_existing_seed_skipped_unless_forced(self, tmp_path):
        cfg = ExperimentConfig(**FAST, out_dir=str(tmp_path))
        path = train(cfg)
        seed_file = Path(tmp_path) / "metrics_feudalgain_seed0.csv"
        marker = seed_file.stat().st_mtime_ns
        train(cfg)
        assert seed_file.stat().st_mtime_ns == marker
        train(replace(cfg, force=True))
        assert seed_file.stat().st_mtime_ns != marker
        assert path.exists()

    def test_paired_goals_across_variants(self, tmp_path):
        """Different modes see the same training goal sequence per seed."""
        from feudalgain.domain import builtin_domain
        from feudalgain.usersim import sample_goal
        import numpy as np
        ontology, db = builtin_domain("toy_cr")
        goals_a = [sample_goal(ontology, db, np.random.default_rng([2, 0, d]))
                   for d in range(1, 6)]
        goals_b = [sample_goal(ontology, db, np.random.default_rng([2, 0, d]))
                   for d in range(1, 6)]
        assert goals_a == goals_b

    def test_train_writes_checkpoint_and_loss_log(self, tmp_path):
        cfg = ExperimentConfig(**FAST, out_dir=str(tmp_path))
        rows, _ = train_seed(cfg, 0, out_dir=Path(tmp_path))
        assert (Path(tmp_path) / "checkpoint_feudalgain_seed0.npz").exists()
        assert (Path(tmp_path) / "loss_feudalgain_seed0.csv").exists()
        assert [r["checkpoint"] for r in rows] == [20, 40]
        for row in rows:
            assert 0.0 <= row["success_rate"] <= 1.0


class TestEvaluateCheckpoint:
    def test_scripted_oracle_row(self, tmp_path):
        spec = tmp_path / "oracle.json"
        spec.write_text(json.dumps({"kind": "scripted_oracle",
                                    "domain": "toy_cr"}), encoding="utf-8")
        row = evaluate_checkpoint(spec, "env1", 50, seed=0)
        assert row["success_rate"] >= 0.9
        assert row["env"] == "env1"

    def test_always_bye_never_succeeds(self, tmp_path):
        spec = tmp_path / "bye.json"
        spec.write_text(json.dumps({"kind": "always_bye",
                                    "domain": "toy_cr"}), encoding="utf-8")
        row = evaluate_checkpoint(spec, "env1", 20, seed=0)
        assert row["success_rate"] == 0.0
        assert row["avg_turns"] == 1.0


class TestSweepAndPlot:
    def test_noise_sweep_rows_and_plot(self, tmp_path):
        cfg = ExperimentConfig(domain="toy_cr", env="env1",
                               train_dialogues=20, eval_every=20,
                               eval_dialogues=5, seeds=(0,),
                               out_dir=str(tmp_path))
        path = run_noise_sweep(cfg, rates=[0.0, 0.3], checkpoints=[20])
        rows = read_metrics(path)
        assert {r["mode"] for r in rows} == {"feudalgain", "feudal-nn"}
        assert {r["env"] for r in rows} == {"env1@e=0", "env1@e=0.3"}
        svg = plot_metrics(path, tmp_path / "curve.svg")
        assert svg.read_text(encoding="utf-8").lstrip().startswith("<?xml")
