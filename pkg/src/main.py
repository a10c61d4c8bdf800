"""Command-line entry point for the explanation sanity benchmark."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger

from .config import COMMANDS, ExperimentConfig, load_config
from .harness.commands import cmd_bench, cmd_explain, cmd_metrics, cmd_synth, cmd_train
from .utils.errors import BenchmarkError
from .utils.logging import setup_logging

DEFAULT_CONFIG = "config.yaml"


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per benchmark stage."""
    parser = argparse.ArgumentParser(
        prog="xbench", description="Sanity benchmark for explanation approaches on binary classifiers"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        "synth": "generate a synthetic planted-rule dataset",
        "train": "train classifiers and the similar-model family",
        "explain": "explain every evaluation sample (resumable)",
        "metrics": "compute stability, robustness, effectiveness and consistency",
        "bench": "time every explanation approach",
    }
    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=helps[command])
        sub.add_argument("--config", default=None, help=f"experiment config (default: {DEFAULT_CONFIG})")
        sub.add_argument("--out", default=None, help="output directory")
        sub.add_argument("--seed", type=int, default=None, help="root seed")
        sub.add_argument("--jobs", type=int, default=None, help="worker processes (-1: one per CPU)")
        if command == "synth":
            sub.add_argument("--spec", default=None, help="standalone synthetic spec file")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Load the config file and apply command-line overrides."""
    path = args.config
    if path is None and Path(DEFAULT_CONFIG).exists():
        path = DEFAULT_CONFIG
    cfg = load_config(path)
    return cfg.with_overrides(output_dir=args.out, seed=args.seed, jobs=args.jobs)


def run(args: argparse.Namespace):
    cfg = resolve_config(args)
    setup_logging(cfg.log_level, cfg.log_file, rotation=cfg.log_rotation)
    logger.info(f"Running {args.command} into {cfg.output_dir} (seed {cfg.seed}, jobs {cfg.jobs})")

    if args.command == "synth":
        path = cmd_synth(cfg, args.spec)
        print(path)
    elif args.command == "train":
        index = cmd_train(cfg)
        logger.info(f"Base model {index.base_model} is {index.classifiers[index.base_model]}")
    elif args.command == "explain":
        computed = cmd_explain(cfg)
        logger.info(f"Explained {sum(computed.values())} samples: {computed}")
    elif args.command == "metrics":
        cmd_metrics(cfg)
    elif args.command == "bench":
        runtime = cmd_bench(cfg)
        print(runtime.to_string(index=False))


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns the process exit code.

    0 on success, 1 on a validation error, 2 on any other failure.
    """
    args = build_parser().parse_args(argv)
    setup_logging()
    try:
        run(args)
    except BenchmarkError as e:
        if e.exit_code == 1:
            logger.error(f"{args.command} failed: {e}")
        else:
            logger.exception(f"{args.command} failed: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.warning("Interrupted; completed explanations are kept in the caches")
        return 2
    except Exception as e:
        logger.exception(f"{args.command} failed unexpectedly: {e}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
