"""Self-describing model files (.npz container with a JSON header)."""

import json
import os
import zipfile
from pathlib import Path
from typing import Union

import numpy as np
from loguru import logger

from ..utils.errors import ModelFormatError
from .base import ClassifierModel, TrainConfig
from .forest import RandomForest
from .knn import NearestNeighbors
from .mlp import MultilayerPerceptron

MAGIC = "XBENCH-MODEL"
FORMAT_VERSION = 1
META_KEY = "__meta__"

ESTIMATORS = {
    "random_forest": RandomForest,
    "knn": NearestNeighbors,
    "mlp": MultilayerPerceptron,
}


def save_model(model: ClassifierModel, path: Union[str, Path]) -> Path:
    """Write a model atomically.

    Args:
        model: Trained model
        path: Destination file

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {
        "magic": MAGIC,
        "format_version": FORMAT_VERSION,
        "model_id": model.model_id,
        **model.identity(),
    }
    arrays = model.learned.to_arrays()
    if META_KEY in arrays:
        raise ModelFormatError(f"learned parameters may not use the reserved name {META_KEY}")

    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        np.savez(f, **{META_KEY: np.array(json.dumps(meta, sort_keys=True))}, **arrays)
    os.replace(tmp, path)
    logger.debug(f"Saved model {model.model_id} to {path}")
    return path


def load_model(path: Union[str, Path]) -> ClassifierModel:
    """Read a model written by ``save_model``.

    Raises:
        ModelFormatError: unreadable, truncated, foreign or version-mismatched file
    """
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as archive:
            meta = json.loads(str(archive[META_KEY][()]))
            arrays = {name: archive[name] for name in archive.files if name != META_KEY}
    except FileNotFoundError:
        raise
    except (OSError, ValueError, EOFError, KeyError, zipfile.BadZipFile) as e:
        raise ModelFormatError(f"cannot read model file {path}: {e}") from e

    if meta.get("magic") != MAGIC:
        raise ModelFormatError(f"{path} is not a model file")
    if meta.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path} has format version {meta.get('format_version')}, expected {FORMAT_VERSION}"
        )

    try:
        config = TrainConfig.model_validate(meta["config"])
        learned = ESTIMATORS[config.algorithm].from_arrays(arrays)
        model = ClassifierModel(
            config=config,
            learned=learned,
            dictionary_fingerprint=meta["dictionary_fingerprint"],
            n_features=int(meta["n_features"]),
            label_names=tuple(meta["label_names"]),
        )
    except (KeyError, ValueError, IndexError) as e:
        raise ModelFormatError(f"{path} has inconsistent contents: {e}") from e

    if model.model_id != meta.get("model_id"):
        raise ModelFormatError(
            f"{path} content hash {model.model_id} does not match stored id {meta.get('model_id')}"
        )
    return model
