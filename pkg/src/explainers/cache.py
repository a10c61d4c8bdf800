"""Resumable JSON-lines cache of explanations."""

import json
import os
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from loguru import logger

from ..utils.errors import CacheError
from .base import ExplainerKind, Explanation


class ExplanationCache:
    """Explanations of one approach under one model.

    Stored at ``<root>/<approach>/<model_id>.jsonl``, one record per line.
    Records are appended as they finish; ``compact`` rewrites the file in
    evaluation order.
    """

    def __init__(self, root: Union[str, Path], approach: ExplainerKind, model_id: str):
        """Initialize the cache.

        Args:
            root: Cache directory
            approach: Explainer kind
            model_id: Model the explanations belong to
        """
        self.approach = ExplainerKind(approach)
        self.model_id = model_id
        self.path = Path(root) / self.approach.value / f"{model_id}.jsonl"

    def exists(self) -> bool:
        return self.path.exists()

    def load(self, params_hash: Optional[str] = None) -> Dict[str, Explanation]:
        """Cached explanations by sample id.

        A truncated final line (an interrupted run) is ignored; any other
        unreadable line is an error. Records made with other parameters are
        skipped when ``params_hash`` is given.
        """
        if not self.path.exists():
            return {}
        lines = self.path.read_text(encoding="utf-8").split("\n")
        entries: Dict[str, Explanation] = {}
        stale = 0
        for number, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                explanation = Explanation.from_dict(json.loads(line))
            except (ValueError, KeyError, TypeError) as e:
                if number == len(lines):
                    logger.warning(f"Ignoring truncated last record in {self.path}")
                    continue
                raise CacheError(f"{self.path}, line {number}: {e}") from e
            if explanation.model_id != self.model_id or explanation.approach != self.approach:
                raise CacheError(f"{self.path}, line {number}: record belongs to another cache")
            if params_hash is not None and explanation.params_hash != params_hash:
                stale += 1
                continue
            entries[explanation.sample_id] = explanation
        if stale:
            logger.info(f"Skipped {stale} cached {self.approach.value} records made with other parameters")
        return entries

    def append(self, explanation: Explanation):
        """Append one finished explanation."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(explanation.to_dict()) + "\n")
            f.flush()

    def write_all(self, explanations: Iterable[Explanation]):
        """Replace the file with the given explanations, atomically."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_name(self.path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as f:
            for explanation in explanations:
                f.write(json.dumps(explanation.to_dict()) + "\n")
        os.replace(tmp, self.path)

    def compact(self, order: List[str], params_hash: Optional[str] = None) -> List[Explanation]:
        """Rewrite the cache in evaluation order, dropping unlisted records.

        Raises:
            CacheError: If a listed sample has no record
        """
        entries = self.load(params_hash)
        missing = [sid for sid in order if sid not in entries]
        if missing:
            raise CacheError(
                f"{self.path} lacks {len(missing)} explanations (first: {missing[0]})"
            )
        ordered = [entries[sid] for sid in order]
        self.write_all(ordered)
        return ordered

    def require(self, order: List[str]) -> List[Explanation]:
        """Explanations for ``order``; error if any are missing."""
        entries = self.load()
        missing = [sid for sid in order if sid not in entries]
        if missing:
            raise CacheError(
                f"no cached {self.approach.value} explanations for model {self.model_id} "
                f"on {len(missing)} samples (first: {missing[0]}); run the explain command first"
            )
        return [entries[sid] for sid in order]
