"""Benchmark harness: subcommands, worker pool and report writers."""

from .commands import (
    Experiment,
    ModelIndex,
    cmd_bench,
    cmd_explain,
    cmd_metrics,
    cmd_synth,
    cmd_train,
    load_dataset,
    make_split,
)
from .pool import ExplainJob, explain_many, resolve_jobs

__all__ = [
    "Experiment",
    "ModelIndex",
    "cmd_bench",
    "cmd_explain",
    "cmd_metrics",
    "cmd_synth",
    "cmd_train",
    "load_dataset",
    "make_split",
    "ExplainJob",
    "explain_many",
    "resolve_jobs",
]
