"""CSV ingestion and export of labeled datasets."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from ..utils.errors import DatasetError, DatasetLoadError
from .dataset import FEATURE_KINDS, FeatureDictionary, LabeledDataset

PathLike = Union[str, Path]

RESERVED_COLUMNS = ("sample_id", "label")
SIDECAR_SUFFIX = ".features.json"


def sidecar_path(csv_path: PathLike) -> Path:
    """Default sidecar location beside a dataset CSV (``toy.csv`` -> ``toy.features.json``)."""
    path = Path(csv_path)
    return path.with_name(path.stem + SIDECAR_SUFFIX)


@dataclass(frozen=True)
class DatasetSidecar:
    """Contents of a dataset sidecar file."""

    kinds: Dict[str, str]
    label_order: Optional[Tuple[str, ...]] = None


def load_sidecar(path: PathLike) -> DatasetSidecar:
    """Read a dataset sidecar.

    Two shapes are accepted: a JSON array of {name, kind}, or an object
    ``{"labels": [...], "features": [{name, kind}, ...]}`` that also fixes
    the class order.

    Args:
        path: Sidecar file path

    Returns:
        Feature kinds by name and the class order, if recorded
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DatasetLoadError(f"cannot read dictionary sidecar {path}: {e}") from e

    label_order = None
    if isinstance(raw, list):
        records = raw
    elif isinstance(raw, dict):
        records = raw.get("features", [])
        labels = raw.get("labels")
        if labels is not None:
            if not isinstance(labels, list) or not all(isinstance(x, str) and x for x in labels):
                raise DatasetLoadError(f"sidecar {path}: 'labels' must be a list of class names")
            if len(set(labels)) != len(labels):
                raise DatasetLoadError(f"sidecar {path}: 'labels' lists a class twice")
            label_order = tuple(labels)
    else:
        raise DatasetLoadError(f"dictionary sidecar {path} must be a JSON array or object")

    if not isinstance(records, list):
        raise DatasetLoadError(f"sidecar {path}: 'features' must be a JSON array")

    kinds: Dict[str, str] = {}
    for position, record in enumerate(records):
        if not isinstance(record, dict) or "name" not in record or "kind" not in record:
            raise DatasetLoadError(
                f"sidecar entry {position} must be an object with 'name' and 'kind'"
            )
        if record["kind"] not in FEATURE_KINDS:
            raise DatasetLoadError(
                f"sidecar entry {position} has unknown kind '{record['kind']}'"
            )
        if record["name"] in kinds:
            raise DatasetLoadError(f"sidecar lists feature '{record['name']}' twice")
        kinds[record["name"]] = record["kind"]
    return DatasetSidecar(kinds=kinds, label_order=label_order)


def _validate_header(header: Sequence[str]) -> list[str]:
    if len(header) < 3 or list(header[:2]) != list(RESERVED_COLUMNS):
        raise DatasetLoadError(
            "malformed header: expected 'sample_id,label,<feature names...>'", row=1
        )
    features = [str(h) for h in header[2:]]
    seen: set[str] = set()
    for name in features:
        if name == "" or name in RESERVED_COLUMNS:
            raise DatasetLoadError(f"invalid feature name '{name}'", row=1)
        if name in seen:
            raise DatasetLoadError("duplicate feature name", row=1, column=name)
        seen.add(name)
    return features


def load_csv(
    path: PathLike,
    sidecar: Optional[PathLike] = None,
    label_order: Optional[Sequence[str]] = None,
) -> LabeledDataset:
    """Load a labeled binary dataset from the ingestion CSV format.

    Class order is ``label_order`` when given, else the order recorded in the
    sidecar, else first appearance in the file. Feature kinds default to
    "synthetic" unless the sidecar provides them. Without ``sidecar`` the
    file written beside the CSV by ``write_csv`` is used when present.

    Args:
        path: CSV path with header ``sample_id,label,<features...>``
        sidecar: Optional sidecar path
        label_order: Optional explicit class order

    Returns:
        Validated dataset

    Raises:
        DatasetLoadError: On any malformed header, cell or identifier
    """
    path = Path(path)
    if not path.exists():
        raise DatasetLoadError(f"dataset file not found: {path}")

    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DatasetLoadError(f"cannot parse {path}: {e}") from e

    if raw.shape[0] < 1:
        raise DatasetLoadError("file has no header row", row=1)

    feature_names = _validate_header(raw.iloc[0].tolist())
    body = raw.iloc[1:].reset_index(drop=True)
    body.columns = list(RESERVED_COLUMNS) + feature_names

    # File row numbers are 1-based and the header is row 1
    cells = body[feature_names]
    valid = cells.isin(["0", "1"]).to_numpy()
    if not valid.all():
        r, c = np.argwhere(~valid)[0]
        raise DatasetLoadError(
            f"non-binary cell value '{cells.iat[r, c]}'", row=int(r) + 2, column=feature_names[c]
        )

    sample_ids = body["sample_id"].tolist()
    seen: Dict[str, int] = {}
    for r, sid in enumerate(sample_ids):
        if sid == "":
            raise DatasetLoadError("empty sample_id", row=r + 2, column="sample_id")
        if sid in seen:
            raise DatasetLoadError(
                f"duplicate sample_id '{sid}' (first at row {seen[sid]})",
                row=r + 2,
                column="sample_id",
            )
        seen[sid] = r + 2

    label_strings = body["label"].tolist()
    for r, name in enumerate(label_strings):
        if name == "":
            raise DatasetLoadError("empty label", row=r + 2, column="label")

    if sidecar is None and sidecar_path(path).exists():
        sidecar = sidecar_path(path)
        logger.debug(f"Using sidecar {sidecar}")
    extra = load_sidecar(sidecar) if sidecar is not None else DatasetSidecar(kinds={})

    if label_order is None:
        label_order = extra.label_order
    if label_order is None:
        label_names = list(dict.fromkeys(label_strings))
    else:
        label_names = list(label_order)
        missing = sorted(set(label_strings) - set(label_names))
        if missing:
            raise DatasetLoadError(f"labels not in label order: {', '.join(missing)}")
    label_index = {name: i for i, name in enumerate(label_names)}

    unknown = sorted(set(extra.kinds) - set(feature_names))
    if unknown:
        raise DatasetLoadError(f"sidecar names unknown features: {', '.join(unknown)}")
    kinds = [extra.kinds.get(name, "synthetic") for name in feature_names]

    try:
        dataset = LabeledDataset(
            dictionary=FeatureDictionary(names=tuple(feature_names), kinds=tuple(kinds)),
            samples=(cells.to_numpy() == "1").astype(np.uint8).reshape(len(body), len(feature_names)),
            labels=np.array([label_index[name] for name in label_strings], dtype=np.int64),
            label_names=tuple(label_names),
            sample_ids=tuple(sample_ids),
        )
    except DatasetError as e:
        raise DatasetLoadError(str(e)) from e

    logger.info(f"Loaded {path.name}: {dataset.summary()}")
    return dataset


def write_csv(dataset: LabeledDataset, path: PathLike, sidecar: bool = True) -> Path:
    """Write a dataset in the ingestion CSV format (UTF-8, LF newlines).

    Args:
        dataset: Dataset to write
        path: Destination path
        sidecar: Also write the sidecar (class order and feature kinds) beside it

    Returns:
        Path of the written CSV
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dataset.to_frame().to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    if sidecar:
        write_sidecar(dataset, sidecar_path(path))
    logger.debug(f"Wrote {dataset.n} samples to {path}")
    return path


def write_sidecar(dataset: LabeledDataset, path: PathLike) -> Path:
    """Write the class order and {name, kind} records of a dataset."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    content = {"labels": list(dataset.label_names), "features": dataset.dictionary.to_records()}
    path.write_text(json.dumps(content, indent=2) + "\n", encoding="utf-8")
    return path
