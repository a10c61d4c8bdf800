"""Dice similarity of top-k explanation feature sets."""

from typing import Optional, Sequence

import numpy as np

from ..explainers.base import Explanation

# Rank of a feature absent from an explanation.
ABSENT = np.iinfo(np.int32).max


def dice_similarity(e1: Explanation, e2: Explanation, k: int) -> Optional[float]:
    """2|a ∩ b| / (|a| + |b|) over the top-min(k, |e|) feature sets.

    Returns None when both sets are empty: the similarity is undefined and
    the caller counts the pair as skipped.
    """
    a = e1.top_features(k)
    b = e2.top_features(k)
    if not a and not b:
        return None
    return 2.0 * len(a & b) / (len(a) + len(b))


class RankTable:
    """Feature ranks of many explanations for vectorized dice over all k.

    ``ranks[i, f]`` is the position of feature f in explanation i, so f is
    in the top-k set exactly when its rank is below k.
    """

    def __init__(self, explanations: Sequence[Explanation], d: Optional[int] = None):
        top = max((item.feature for e in explanations for item in e.items), default=-1)
        d = max(d or 0, top + 1, 1)
        self.ranks = np.full((len(explanations), d), ABSENT, dtype=np.int64)
        self.lengths = np.zeros(len(explanations), dtype=np.int64)
        for i, e in enumerate(explanations):
            for position, item in enumerate(e.items):
                self.ranks[i, item.feature] = position
            self.lengths[i] = len(e.items)

    def dice(self, i: int, others: np.ndarray, ks: np.ndarray) -> np.ndarray:
        """Dice of explanation i against each of ``others`` at each k.

        Returns an array of shape (len(others), len(ks)); pairs of two empty
        explanations are NaN.
        """
        others = np.asarray(others, dtype=np.int64)
        ks = np.asarray(ks, dtype=np.int64)
        joint = np.maximum(self.ranks[i][None, :], self.ranks[others])
        common = (joint[:, :, None] < ks[None, None, :]).sum(axis=1)
        sizes = np.minimum(self.lengths[i], ks)[None, :] + np.minimum(
            self.lengths[others][:, None], ks[None, :]
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(sizes > 0, 2.0 * common / sizes, np.nan)
