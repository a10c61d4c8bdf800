"""Worker pool for per-sample explanation jobs."""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional

import numpy as np

from ..explainers.base import ExplainerKind, ExplainerParams, Explanation
from ..explainers.registry import explain
from ..utils.logging import setup_logging

# Per-process state installed by the pool initializer.
_worker: Dict[str, Any] = {}


@dataclass(frozen=True)
class ExplainJob:
    """One sample to explain."""

    sample_id: str
    x: np.ndarray
    seed: int


def _init_worker(model, kind: ExplainerKind, params: ExplainerParams, log_level: str):
    setup_logging(log_level=log_level)
    _worker.update(model=model, kind=kind, params=params)


def _run_job(job: ExplainJob) -> Dict[str, Any]:
    explanation = explain(
        _worker["kind"], _worker["model"], job.x, _worker["params"], job.seed, job.sample_id
    )
    return explanation.to_dict()


def resolve_jobs(jobs: int) -> int:
    """Worker count; -1 means one per CPU."""
    if jobs == -1:
        return os.cpu_count() or 1
    return max(1, jobs)


def explain_many(
    model,
    kind: ExplainerKind,
    params: ExplainerParams,
    jobs: List[ExplainJob],
    workers: int = 1,
    log_level: str = "INFO",
    chunksize: Optional[int] = None,
) -> Iterator[Explanation]:
    """Explain every job, yielding results in job order.

    With one worker everything runs in this process; otherwise a process
    pool shares one read-only copy of the model per worker.
    """
    workers = resolve_jobs(workers)
    if workers == 1 or len(jobs) <= 1:
        for job in jobs:
            yield explain(kind, model, job.x, params, job.seed, job.sample_id)
        return

    chunksize = chunksize or max(1, len(jobs) // (workers * 4))
    with ProcessPoolExecutor(
        max_workers=workers,
        initializer=_init_worker,
        initargs=(model, kind, params, log_level),
    ) as executor:
        for record in executor.map(_run_job, jobs, chunksize=chunksize):
            yield Explanation.from_dict(record)
