"""Experiment orchestration: training, evaluation, ablations and sweeps."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import yaml

from .checkpoint import load_checkpoint, save_checkpoint
from .dialogue import run_dialogue
from .domain import builtin_domain
from .policy import PolicyConfig, PolicySet
from .rewards import RewardConfig
from .usersim import EnvProfile, sample_goal

logger = logging.getLogger(__name__)

METRICS_COLUMNS = ("seed", "env", "mode", "checkpoint", "success_rate",
                   "avg_reward", "avg_turns")

# rng stream tags, so the user-side streams never depend on the policy
_STREAM_TRAIN_USER = 2
_STREAM_EVAL_USER = 3


@dataclass(frozen=True)
class ExperimentConfig:
    domain: str = "toy_cr"
    env: str = "env1"
    mode: str = "feudalgain"
    use_pass: bool = True
    use_ig: bool = True
    masks_override: bool | None = None   # force masks off with False
    error_rate_override: float | None = None
    train_dialogues: int = 4000
    eval_every: int = 200
    eval_dialogues: int = 500
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4, 5, 6, 7, 8, 9)
    delta: float = 0.2
    gamma: float = 0.99
    lr_i: float = 3e-4
    lr_mg: float = 1e-3
    max_turns: int = 25
    out_dir: str = "runs"
    force: bool = False

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if self.train_dialogues % self.eval_every != 0:
            raise ValueError("eval_every must divide train_dialogues")

    @staticmethod
    def from_file(path, **overrides) -> "ExperimentConfig":
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        raw.update({k: v for k, v in overrides.items() if v is not None})
        if "seeds" in raw:
            raw["seeds"] = tuple(raw["seeds"])
        return ExperimentConfig(**raw)

    def policy_config(self) -> PolicyConfig:
        return PolicyConfig(mode=self.mode, use_pass=self.use_pass,
                            use_ig=self.use_ig, lr_i=self.lr_i,
                            lr_mg=self.lr_mg, gamma=self.gamma,
                            max_turns=self.max_turns)

    def reward_config(self) -> RewardConfig:
        return RewardConfig(delta=self.delta)

    def env_profile(self) -> EnvProfile:
        env = EnvProfile.by_name(self.env)
        if self.error_rate_override is not None:
            env = env.with_error_rate(self.error_rate_override)
        if self.masks_override is not None:
            env = EnvProfile(env.id, env.semantic_error_rate,
                             self.masks_override, env.user_profile)
        return env

    def mode_label(self) -> str:
        label = self.mode
        if self.mode != "feudalgain" and not self.use_pass:
            label += "-nopass"
        if self.mode == "feudalgain" and not self.use_ig:
            label += "-noig"
        return label


def _format_row(row: dict) -> dict:
    out = dict(row)
    for key in ("success_rate", "avg_reward", "avg_turns"):
        out[key] = f"{row[key]:.6f}"
    return out


def write_metrics(path, rows: list[dict]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRICS_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(_format_row(row))


def read_metrics(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["seed"] = int(row["seed"])
        row["checkpoint"] = int(row["checkpoint"])
        for key in ("success_rate", "avg_reward", "avg_turns"):
            row[key] = float(row[key])
    return rows


def evaluate_policy(policy, env: EnvProfile, ontology, db, n_dialogues: int,
                    seed: int, checkpoint_tag: int,
                    reward_cfg: RewardConfig = RewardConfig(),
                    max_turns: int = 25) -> dict:
    """Greedy (mean-weight) evaluation on fresh goals; no learning."""
    successes = 0
    total_reward = 0.0
    total_turns = 0
    for i in range(n_dialogues):
        user_rng = np.random.default_rng(
            [_STREAM_EVAL_USER, seed, checkpoint_tag, i])
        ep = run_dialogue(policy, env, ontology, db, user_rng,
                          policy_rng=np.random.default_rng([9, seed, i]),
                          mode="eval", max_turns=max_turns,
                          reward_cfg=reward_cfg)
        successes += ep.success
        total_reward += ep.total_reward
        total_turns += ep.length
    return {
        "seed": seed,
        "env": env.id,
        "checkpoint": checkpoint_tag,
        "success_rate": successes / n_dialogues,
        "avg_reward": total_reward / n_dialogues,
        "avg_turns": total_turns / n_dialogues,
    }


def train_seed(cfg: ExperimentConfig, seed: int,
               eval_at: list[int] | None = None,
               out_dir: Path | None = None) -> tuple[list[dict], PolicySet]:
    """Train one seed, evaluating at the requested dialogue counts."""
    ontology, db = builtin_domain(cfg.domain)
    env = cfg.env_profile()
    reward_cfg = cfg.reward_config()
    ps = PolicySet(ontology, db, cfg.policy_config(), seed=seed)
    policy_rng = np.random.default_rng([1, seed])
    if eval_at is None:
        eval_at = list(range(cfg.eval_every, cfg.train_dialogues + 1,
                             cfg.eval_every))
    eval_points = sorted(set(eval_at))
    rows = []
    for d in range(1, max(eval_points) + 1):
        # the user stream depends only on (seed, dialogue index) so that
        # every policy variant sees exactly the same goal sequence
        user_rng = np.random.default_rng([_STREAM_TRAIN_USER, seed, d])
        goal = sample_goal(ontology, db, user_rng)
        ep = run_dialogue(ps, env, ontology, db, user_rng,
                          policy_rng=policy_rng, mode="train",
                          max_turns=cfg.max_turns, reward_cfg=reward_cfg,
                          goal=goal)
        ps.learn_from(ep, reward_cfg, policy_rng)
        if d in eval_points:
            row = evaluate_policy(ps, env, ontology, db, cfg.eval_dialogues,
                                  seed, d, reward_cfg, cfg.max_turns)
            row["mode"] = cfg.mode_label()
            rows.append(row)
            logger.info("seed %d %s @%d: success=%.3f reward=%.2f",
                        seed, cfg.mode_label(), d, row["success_rate"],
                        row["avg_reward"])
    if out_dir is not None:
        save_checkpoint(out_dir / f"checkpoint_{cfg.mode_label()}_"
                                  f"seed{seed}.npz",
                        ps, {"env": env.id})
        with open(out_dir / f"loss_{cfg.mode_label()}_seed{seed}.csv", "w",
                  newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["update", "loss"])
            for update, loss in ps.pi_i.loss_log:
                writer.writerow([update, f"{loss:.8f}"])
    return rows, ps


def train(cfg: ExperimentConfig) -> Path:
    """Train all configured seeds; returns the merged metrics CSV path."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    label = cfg.mode_label()
    for seed in cfg.seeds:
        seed_file = out_dir / f"metrics_{label}_seed{seed}.csv"
        if seed_file.exists() and not cfg.force:
            logger.info("seed %d already finished; skipping (use --force)",
                        seed)
            continue
        rows, _ = train_seed(cfg, seed, out_dir=out_dir)
        write_metrics(seed_file, rows)
    merged = []
    for seed in cfg.seeds:
        merged.extend(read_metrics(out_dir / f"metrics_{label}_seed{seed}.csv"))
    merged_path = out_dir / f"metrics_{label}.csv"
    write_metrics(merged_path, merged)
    return merged_path


ABLATION_VARIANTS = (
    {"mode": "feudalgain", "use_pass": True, "use_ig": True},
    {"mode": "feudal-nn", "use_pass": True, "use_ig": True},
    {"mode": "feudal", "use_pass": True, "use_ig": True},
    {"mode": "feudal-nn", "use_pass": False, "use_ig": True},
)


def run_ablation_suite(cfg: ExperimentConfig) -> Path:
    """Train every ablation variant on paired goal sequences."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    merged = []
    for variant in ABLATION_VARIANTS:
        vcfg = replace(cfg, **variant)
        path = train(vcfg)
        merged.extend(read_metrics(path))
    merged_path = out_dir / "metrics_ablation.csv"
    write_metrics(merged_path, merged)
    return merged_path


def run_noise_sweep(cfg: ExperimentConfig, rates: list[float],
                    checkpoints: list[int] = (200, 4000)) -> Path:
    """FeudalGain vs feudal-nn across semantic error rates."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    eval_at = sorted(set(checkpoints))
    rows = []
    for mode in ("feudalgain", "feudal-nn"):
        for rate in rates:
            vcfg = replace(cfg, mode=mode, error_rate_override=rate,
                           train_dialogues=max(eval_at))
            for seed in cfg.seeds:
                seed_rows, _ = train_seed(vcfg, seed, eval_at=eval_at)
                for row in seed_rows:
                    row["mode"] = vcfg.mode_label()
                    row["env"] = f"{vcfg.env}@e={rate:g}"
                rows.extend(seed_rows)
    merged_path = out_dir / "metrics_sweep.csv"
    write_metrics(merged_path, rows)
    return merged_path


def evaluate_checkpoint(path, env_name: str, n_dialogues: int,
                        seed: int) -> dict:
    policy, meta = load_checkpoint(path)
    if hasattr(policy, "ontology"):
        ontology, db = policy.ontology, policy.db
    else:
        ontology, db = builtin_domain(meta.get("domain", "toy_cr"))
    env = EnvProfile.by_name(env_name)
    row = evaluate_policy(policy, env, ontology, db, n_dialogues, seed,
                          checkpoint_tag=meta.get("dialogues_trained", 0))
    row["mode"] = meta.get("config", {}).get("mode", meta.get("kind", "?"))
    return row


def plot_metrics(metrics_path, out_path, loss_path=None):
    """Learning-curve SVG (success rate vs dialogues, one line per mode)."""
    import matplotlib
    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    rows = read_metrics(metrics_path)
    by_mode: dict[str, dict[int, list[float]]] = {}
    for row in rows:
        by_mode.setdefault(row["mode"], {}).setdefault(
            row["checkpoint"], []).append(row["success_rate"])
    n_plots = 2 if loss_path else 1
    fig, axes = plt.subplots(1, n_plots, figsize=(6 * n_plots, 4))
    ax = axes[0] if n_plots == 2 else axes
    for mode, series in sorted(by_mode.items()):
        xs = sorted(series)
        means = [float(np.mean(series[x])) for x in xs]
        ax.plot(xs, means, marker="o", label=mode)
    ax.set_xlabel("training dialogues")
    ax.set_ylabel("success rate")
    ax.set_ylim(0, 1.02)
    ax.legend()
    ax.grid(alpha=0.3)
    if loss_path:
        with open(loss_path, newline="", encoding="utf-8") as fh:
            loss_rows = list(csv.DictReader(fh))
        axes[1].plot([int(r["update"]) for r in loss_rows],
                     [float(r["loss"]) for r in loss_rows], lw=0.8)
        axes[1].set_xlabel("update")
        axes[1].set_ylabel("replay loss (512 samples)")
        axes[1].grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return Path(out_path)
