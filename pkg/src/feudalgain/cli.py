"""Command-line entry point: training, evaluation, ablations, sweeps,
plots, and the chat service."""

from __future__ import annotations

import logging
from pathlib import Path

import click

from .harness import (ExperimentConfig, evaluate_checkpoint, plot_metrics,
                      run_ablation_suite, run_noise_sweep, train)

ENVS = [f"env{i}" for i in range(1, 7)]
MODES = ["feudalgain", "feudal", "feudal-nn"]


def _experiment_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="YAML config file; flags override."),
        click.option("--domain", default=None,
                     help="Built-in domain name (toy_cr, toy_sfr)."),
        click.option("--env", type=click.Choice(ENVS), default=None),
        click.option("--mode", type=click.Choice(MODES), default=None),
        click.option("--seed", "seeds", type=int, multiple=True,
                     help="Seed; repeat for several."),
        click.option("--no-pass", "no_pass", is_flag=True,
                     help="Drop the pass action from the baseline."),
        click.option("--no-ig", "no_ig", is_flag=True,
                     help="Train the slot policy on the extrinsic reward."),
        click.option("--no-masks", "no_masks", is_flag=True,
                     help="Disable action masks regardless of env."),
        click.option("--delta", type=float, default=None,
                     help="Information-gain threshold."),
        click.option("--dialogues", type=int, default=None,
                     help="Training dialogues per seed."),
        click.option("--eval-every", type=int, default=None),
        click.option("--eval-dialogues", type=int, default=None),
        click.option("--out", "out_dir", default=None,
                     help="Output directory for metrics and checkpoints."),
        click.option("--force", is_flag=True,
                     help="Re-run seeds whose metrics already exist."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build_config(config_path, domain, env, mode, seeds, no_pass, no_ig,
                  no_masks, delta, dialogues, eval_every, eval_dialogues,
                  out_dir, force) -> ExperimentConfig:
    overrides = {
        "domain": domain,
        "env": env,
        "mode": mode,
        "seeds": tuple(seeds) or None,
        "use_pass": False if no_pass else None,
        "use_ig": False if no_ig else None,
        "masks_override": False if no_masks else None,
        "delta": delta,
        "train_dialogues": dialogues,
        "eval_every": eval_every,
        "eval_dialogues": eval_dialogues,
        "out_dir": out_dir,
        "force": True if force else None,
    }
    if config_path:
        return ExperimentConfig.from_file(config_path, **overrides)
    return ExperimentConfig(**{k: v for k, v in overrides.items()
                               if v is not None})


@click.group(invoke_without_command=True)
@click.option("--serve", "serve_flag", is_flag=True,
              help="Shorthand for the serve subcommand.")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--checkpoint", "checkpoints", multiple=True,
              type=click.Path(exists=True),
              help="Policy checkpoint to serve; repeat for several.")
@click.option("-v", "--verbose", is_flag=True)
@click.pass_context
def main(ctx, serve_flag, port, checkpoints, verbose):
    """Feudal dialogue policies with information-gain rewards."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    if ctx.invoked_subcommand is None:
        if serve_flag:
            _serve(port, checkpoints, record_log="trial_records.jsonl",
                   static_dir=None)
        else:
            click.echo(ctx.get_help())


@main.command("train")
@_experiment_options
def train_cmd(**kwargs):
    """Train policies and write metrics, loss logs, and checkpoints."""
    cfg = _build_config(**kwargs)
    path = train(cfg)
    click.echo(f"metrics written to {path}")


@main.command("evaluate")
@click.option("--checkpoint-in", "checkpoint_in", required=True,
              type=click.Path(exists=True))
@click.option("--env", type=click.Choice(ENVS), default="env1",
              show_default=True)
@click.option("--dialogues", type=int, default=500, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def evaluate_cmd(checkpoint_in, env, dialogues, seed):
    """Evaluate a saved checkpoint greedily on one environment."""
    row = evaluate_checkpoint(checkpoint_in, env, dialogues, seed)
    for key, value in row.items():
        click.echo(f"{key}: {value}")


@main.command("ablate")
@_experiment_options
def ablate_cmd(**kwargs):
    """Run the four-variant ablation suite on paired goal sequences."""
    cfg = _build_config(**kwargs)
    path = run_ablation_suite(cfg)
    click.echo(f"ablation metrics written to {path}")


@main.command("sweep")
@click.option("--rates", default="0,0.15,0.3", show_default=True,
              help="Comma-separated semantic error rates.")
@click.option("--checkpoints", default="200,4000", show_default=True,
              help="Comma-separated evaluation checkpoints.")
@_experiment_options
def sweep_cmd(rates, checkpoints, **kwargs):
    """Noise-robustness sweep: feudalgain vs feudal-nn per error rate."""
    cfg = _build_config(**kwargs)
    rate_list = [float(r) for r in rates.split(",")]
    ckpt_list = [int(c) for c in checkpoints.split(",")]
    path = run_noise_sweep(cfg, rate_list, ckpt_list)
    click.echo(f"sweep metrics written to {path}")


@main.command("plot")
@click.option("--metrics", "metrics_path", required=True,
              type=click.Path(exists=True))
@click.option("--loss", "loss_path", type=click.Path(exists=True),
              default=None)
@click.option("--out", "out_path", default="learning_curves.svg",
              show_default=True)
def plot_cmd(metrics_path, loss_path, out_path):
    """Render learning-curve (and optional loss) SVG plots."""
    plot_metrics(metrics_path, out_path, loss_path)
    click.echo(f"plot written to {out_path}")


@main.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--checkpoint", "checkpoints", multiple=True, required=True,
              type=click.Path(exists=True),
              help="Policy checkpoint to serve; repeat for several.")
@click.option("--record-log", default="trial_records.jsonl",
              show_default=True)
@click.option("--static-dir", default=None,
              help="Directory with the built chat UI.")
def serve_cmd(port, checkpoints, record_log, static_dir):
    """Serve loaded policies over HTTP for human chat sessions."""
    _serve(port, checkpoints, record_log, static_dir)


def _serve(port, checkpoints, record_log, static_dir):
    import uvicorn

    from .service import create_app

    if not checkpoints:
        raise click.UsageError("--checkpoint is required to serve")
    mapping = {Path(p).stem: p for p in checkpoints}
    app = create_app(mapping, record_log=record_log, static_dir=static_dir)
    uvicorn.run(app, host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
