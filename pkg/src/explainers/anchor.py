"""Anchor rules: beam search with Hoeffding precision bounds."""

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from loguru import logger

from .base import AnchorParams, ExplainerKind, Explanation, rule_items
from .perturbation import SeedLike


def hoeffding_radius(n: int, delta: float) -> float:
    """One-sided Hoeffding deviation sqrt(ln(1/delta) / 2n)."""
    return float(np.sqrt(np.log(1.0 / delta) / (2.0 * n))) if n > 0 else np.inf


@dataclass
class Candidate:
    """A conjunction of x's own bits with its running precision estimate."""

    features: Tuple[int, ...]
    hits: int = 0
    n: int = 0
    coverage: float = 1.0

    @property
    def key(self) -> FrozenSet[int]:
        return frozenset(self.features)

    @property
    def precision(self) -> float:
        return self.hits / self.n if self.n else 0.0

    def bounds(self, delta: float) -> Tuple[float, float]:
        radius = hoeffding_radius(self.n, delta)
        return self.precision - radius, self.precision + radius


class AnchorSearch:
    """Samples D(x'|A) and evaluates candidate anchors for one sample."""

    def __init__(self, model, x: np.ndarray, label: int, params: AnchorParams, rng: np.random.Generator):
        self.model = model
        self.x = x
        self.label = label
        self.params = params
        self.rng = rng
        self.d = x.shape[0]
        self.coverage_pool = self.sample(np.zeros(self.d, dtype=bool), params.coverage_samples)

    def sample(self, fixed: np.ndarray, count: int) -> np.ndarray:
        """Draws with ``fixed`` bits equal to x and the rest resampled."""
        resample = (self.rng.random((count, self.d)) < self.params.resample_prob) & ~fixed[None, :]
        random_bits = self.rng.integers(0, 2, size=(count, self.d), dtype=np.uint8)
        return np.where(resample, random_bits, self.x[None, :]).astype(np.uint8)

    def coverage(self, features: Tuple[int, ...]) -> float:
        if not features:
            return 1.0
        idx = list(features)
        return float((self.coverage_pool[:, idx] == self.x[idx]).all(axis=1).mean())

    def mask(self, features: Tuple[int, ...]) -> np.ndarray:
        fixed = np.zeros(self.d, dtype=bool)
        fixed[list(features)] = True
        return fixed

    def evaluate(self, candidates: List[Candidate]) -> List[Candidate]:
        """Sample each candidate until its bound settles against the threshold
        or the per-candidate budget is spent; returns the accepted ones."""
        p = self.params
        pending = list(candidates)
        while pending:
            batches = []
            for cand in pending:
                size = min(p.batch_size, p.max_samples_per_candidate - cand.n)
                batches.append(self.sample(self.mask(cand.features), size))
            labels = self.model.predict_batch(np.vstack(batches))
            start = 0
            for cand, batch in zip(pending, batches):
                chunk = labels[start : start + batch.shape[0]]
                start += batch.shape[0]
                cand.hits += int((chunk == self.label).sum())
                cand.n += batch.shape[0]
            still = []
            for cand in pending:
                lower, upper = cand.bounds(p.delta)
                if lower >= p.precision_threshold or upper < p.precision_threshold:
                    continue
                if cand.n < p.max_samples_per_candidate:
                    still.append(cand)
            pending = still
        return [c for c in candidates if c.bounds(p.delta)[0] >= p.precision_threshold]


def _to_explanation(
    search: AnchorSearch, model, sample_id: str, chosen: Candidate, flags: tuple
) -> Explanation:
    features = chosen.features
    scores = []
    previous = 1.0
    for i in range(len(features)):
        current = search.coverage(features[: i + 1])
        scores.append(max(previous - current, 0.0))
        previous = current
    predicates = [(f, int(search.x[f])) for f in features]
    return Explanation(
        approach=ExplainerKind.ANCHOR,
        model_id=model.model_id,
        sample_id=sample_id,
        predicted_label=search.label,
        items=rule_items(predicates, scores),
        flags=flags,
        notes={
            "precision": chosen.precision,
            "coverage": chosen.coverage,
            "samples": float(chosen.n),
        },
    )


def explain_anchor(
    model, x: np.ndarray, params: AnchorParams, seed: SeedLike, sample_id: str = ""
) -> Explanation:
    """Find a high-precision, high-coverage conjunction of x's bits.

    A rule is accepted once the Hoeffding lower bound on its precision
    reaches the threshold. Search grows rules one predicate per level, keeps
    the ``beam_width`` most precise, and returns the accepted rule with the
    largest coverage at the first level where any is accepted. If none is,
    the most precise rule seen is returned flagged ``non_anchored``.
    """
    x = np.asarray(x, dtype=np.uint8)
    label = model.predict(x)
    rng = np.random.default_rng(seed)
    search = AnchorSearch(model, x, label, params, rng)
    max_size = min(params.max_anchor_size or search.d, search.d)

    empty = Candidate(features=())
    if search.evaluate([empty]):
        return _to_explanation(search, model, sample_id, empty, ())

    best: Candidate = empty
    beam: List[Candidate] = [empty]
    for size in range(1, max_size + 1):
        seen: Dict[FrozenSet[int], Candidate] = {}
        for parent in beam:
            used = set(parent.features)
            for f in range(search.d):
                if f in used:
                    continue
                cand = Candidate(features=parent.features + (f,))
                if cand.key not in seen:
                    cand.coverage = search.coverage(cand.features)
                    seen[cand.key] = cand
        level = list(seen.values())
        if not level:
            break
        accepted = search.evaluate(level)
        if accepted:
            chosen = max(accepted, key=lambda c: (c.coverage, c.precision, [-f for f in c.features]))
            logger.debug(
                f"Anchor for {sample_id or 'sample'}: {chosen.features} "
                f"precision={chosen.precision:.3f} coverage={chosen.coverage:.3f}"
            )
            return _to_explanation(search, model, sample_id, chosen, ())

        ranked = sorted(level, key=lambda c: (-c.precision, -c.coverage, c.features))
        beam = ranked[: params.beam_width]
        if beam[0].precision > best.precision:
            best = beam[0]

    logger.warning(
        f"No anchor reached precision {params.precision_threshold} for {sample_id or 'sample'}; "
        f"returning best rule (precision {best.precision:.3f})"
    )
    return _to_explanation(search, model, sample_id, best, ("non_anchored",))


def rule_precision(
    model, x: np.ndarray, features: Tuple[int, ...], count: int, seed: SeedLike,
    resample_prob: float = 1.0,
) -> float:
    """Fresh precision estimate of a rule over ``count`` draws from D(x'|A)."""
    x = np.asarray(x, dtype=np.uint8)
    params = AnchorParams(resample_prob=resample_prob, coverage_samples=1)
    search = AnchorSearch(model, x, model.predict(x), params, np.random.default_rng(seed))
    draws = search.sample(search.mask(tuple(features)), count)
    return float((model.predict_batch(draws) == search.label).mean())
