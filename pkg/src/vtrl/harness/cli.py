"""Command-line entry point.

Subcommands mirror the experiment lifecycle: train one run, expand and
execute a preset, summarize or plot finished run directories, and the
two verification commands. Every failure path prints a one-line
diagnostic to stderr and exits nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from vtrl.errors import VtrlError
from vtrl.harness.analysis import (
    render_summary_table,
    summarize_runs,
    write_summary_csv,
)
from vtrl.harness.config import parse_config
from vtrl.harness.plot import plot_curves
from vtrl.harness.presets import PRESET_NAMES, run_preset
from vtrl.harness.run import run_experiment
from vtrl.harness.selfcheck import run_gradcheck, run_selfcheck


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vtrl",
        description="visuotactile representation learning experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run one training config")
    train.add_argument("--config", required=True, help="path to a JSON config")
    train.add_argument("--seed", type=int, default=None,
                       help="override the config's seed")
    train.add_argument("--outdir", default=None,
                       help="override the config's output_dir")

    preset = sub.add_parser("preset", help="run a canned experiment grid")
    preset.add_argument("name", choices=PRESET_NAMES)
    preset.add_argument("--outdir", default="runs",
                        help="root directory for the grid's run dirs")
    preset.add_argument("--parallel", type=int, default=1,
                        help="number of worker processes")
    preset.add_argument("--total-steps", type=int, default=20_000,
                        dest="total_steps")
    preset.add_argument("--eval-every", type=int, default=2_000,
                        dest="eval_every")
    preset.add_argument("--image-size", type=int, default=64,
                        dest="image_size")

    summarize = sub.add_parser("summarize", help="tabulate finished runs")
    summarize.add_argument("dirs", nargs="+", help="run directories")
    summarize.add_argument("--milestones", default="20000,100000",
                           help="comma-separated env_steps milestones")
    summarize.add_argument("--csv", default="summary.csv",
                           help="where to write the CSV rendering")

    plot = sub.add_parser("plot", help="render learning curves to SVG")
    plot.add_argument("dirs", nargs="+", help="run directories")
    plot.add_argument("--metric", default="episode_return")
    plot.add_argument("--out", default="curves.svg")

    sub.add_parser("gradcheck", help="finite-difference gradient audit")
    sub.add_parser("selfcheck", help="loss-oracle and determinism probes")
    return parser


def _cmd_train(args) -> int:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.outdir is not None:
        cfg = dataclasses.replace(cfg, output_dir=args.outdir)
    result = run_experiment(cfg)
    print(f"run complete: {result.metrics_path} "
          f"final_return={result.final_return:.3f} "
          f"best_return={result.best_return:.3f} "
          f"random_baseline={result.baseline_return:.3f}")
    return 0


def _cmd_preset(args) -> int:
    results = run_preset(args.name, output_root=args.outdir,
                         parallel=args.parallel,
                         total_env_steps=args.total_steps,
                         eval_every=args.eval_every,
                         image_size=args.image_size)
    for result in results:
        print(f"{result.output_dir}: final_return={result.final_return:.3f} "
              f"random_baseline={result.baseline_return:.3f}")
    print(f"preset {args.name}: {len(results)} runs complete")
    return 0


def _cmd_summarize(args) -> int:
    try:
        milestones = [int(m) for m in args.milestones.split(",") if m]
    except ValueError:
        print(f"error: bad --milestones value {args.milestones!r}",
              file=sys.stderr)
        return 1
    summaries = summarize_runs(args.dirs, milestones)
    if not summaries:
        print("error: no usable runs found", file=sys.stderr)
        return 1
    sys.stdout.write(render_summary_table(summaries, milestones))
    write_summary_csv(summaries, milestones, args.csv)
    print(f"wrote {args.csv}")
    return 0


def _cmd_plot(args) -> int:
    path = plot_curves(args.dirs, args.metric, args.out)
    print(f"wrote {path}")
    return 0


def _cmd_checks(results) -> int:
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"error: {len(failed)} check(s) failed", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "train": _cmd_train,
        "preset": _cmd_preset,
        "summarize": _cmd_summarize,
        "plot": _cmd_plot,
        "gradcheck": lambda a: _cmd_checks(run_gradcheck()),
        "selfcheck": lambda a: _cmd_checks(run_selfcheck()),
    }
    try:
        return handlers[args.command](args)
    except (VtrlError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
