"""Train/test partitioning of labeled datasets."""

import numpy as np
from loguru import logger

from ..utils.errors import SplitError
from .dataset import LabeledDataset, Split


def split_per_class(dataset: LabeledDataset, seed: int) -> Split:
    """Put half of every class in train and the rest in test.

    For an odd class the extra sample goes to test; a class with a single
    sample puts it in train.

    Args:
        dataset: Nonempty dataset
        seed: RNG seed

    Returns:
        Deterministic split for the given seed
    """
    if dataset.n == 0:
        raise SplitError("cannot split an empty dataset")

    rng = np.random.default_rng(seed)
    train, test = [], []
    for label in range(dataset.class_count):
        members = rng.permutation(dataset.class_indices(label))
        if members.size == 0:
            continue
        n_train = 1 if members.size == 1 else members.size // 2
        train.append(members[:n_train])
        test.append(members[n_train:])

    split = Split(train_indices=np.concatenate(train), test_indices=np.concatenate(test))
    logger.info(
        f"Per-class split: {split.train_indices.size} train / {split.test_indices.size} test"
    )
    return split


def split_random(dataset: LabeledDataset, train_fraction: float, seed: int) -> Split:
    """Assign each sample to train with probability ``train_fraction``.

    Args:
        dataset: Nonempty dataset
        train_fraction: Probability in (0, 1)
        seed: RNG seed

    Returns:
        Deterministic split for the given seed

    Raises:
        SplitError: If either side comes out empty
    """
    if dataset.n == 0:
        raise SplitError("cannot split an empty dataset")
    if not 0.0 < train_fraction < 1.0:
        raise SplitError(f"train_fraction must lie in (0, 1), got {train_fraction}")

    rng = np.random.default_rng(seed)
    in_train = rng.random(dataset.n) < train_fraction
    if in_train.all() or not in_train.any():
        side = "test" if in_train.all() else "train"
        raise SplitError(
            f"degenerate split: {side} side is empty "
            f"(n={dataset.n}, train_fraction={train_fraction}, seed={seed})"
        )

    split = Split(
        train_indices=np.flatnonzero(in_train), test_indices=np.flatnonzero(~in_train)
    )
    logger.info(
        f"Random split: {split.train_indices.size} train / {split.test_indices.size} test"
    )
    return split
