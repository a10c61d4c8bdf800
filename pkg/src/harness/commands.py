"""Benchmark subcommands: synth, train, explain, metrics and bench."""

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel, ValidationError

from ..config import ExperimentConfig
from ..data.dataset import LabeledDataset, Split
from ..data.io import load_csv, write_csv
from ..data.splits import split_per_class, split_random
from ..data.synthetic import SyntheticSpec, generate_synthetic
from ..explainers.base import ExplainerKind, Explanation
from ..explainers.cache import ExplanationCache
from ..explainers.registry import explain, sample_seed
from ..models.base import ClassifierModel, TrainConfig
from ..models.persistence import load_model, save_model
from ..models.ranking import information_gain_ranking
from ..models.training import evaluate, train
from ..sanity.consistency import consistency
from ..sanity.effectiveness import effective_feature_weights, effectiveness
from ..sanity.robustness import robustness
from ..sanity.stability import stability
from ..utils.errors import CacheError, ConfigError, FingerprintMismatchError, ModelError
from ..utils.metrics import metrics_exporter
from . import reports
from .pool import ExplainJob, explain_many

RANKING_TOP_N = 10


class ModelIndex(BaseModel):
    """Which trained model plays which role, written by ``train``."""

    dataset: str
    dictionary_fingerprint: str
    classifiers: Dict[str, str]
    base_model: str
    family_base: str
    family_variation: str
    family_values: List[Any]
    family: List[str]

    def member_name(self, position: int) -> str:
        return f"{self.family_base}[{self.family_variation}={self.family_values[position]}]"

    def explained_models(self, cross_classifier: bool) -> List[str]:
        """Model ids that need explanations, each once, in a fixed order."""
        ids = list(self.family) + [self.classifiers[self.base_model]]
        if cross_classifier:
            ids += list(self.classifiers.values())
        return list(dict.fromkeys(ids))

    def scored_classifiers(self, cross_classifier: bool) -> List[str]:
        names = [self.base_model]
        if cross_classifier:
            names += [n for n in self.classifiers if n != self.base_model]
        return names


@dataclass
class Experiment:
    """A validated config with its dataset, split and output layout."""

    cfg: ExperimentConfig
    dataset: LabeledDataset
    split: Split

    @classmethod
    def prepare(cls, cfg: ExperimentConfig, command: str) -> "Experiment":
        cfg.validate_for(command)
        dataset = load_dataset(cfg)
        cfg.validate_for(command, dataset.d)
        split = make_split(cfg, dataset)
        experiment = cls(cfg=cfg, dataset=dataset, split=split)
        experiment.write_effective_config()
        return experiment

    @property
    def name(self) -> str:
        return self.cfg.dataset.name

    @property
    def out(self) -> Path:
        return Path(self.cfg.output_dir)

    @property
    def models_dir(self) -> Path:
        return self.out / "models"

    @property
    def cache_dir(self) -> Path:
        return self.out / "cache"

    @property
    def reports_dir(self) -> Path:
        return self.out / "reports"

    def write_effective_config(self):
        self.out.mkdir(parents=True, exist_ok=True)
        snapshot = json.dumps(self.cfg.model_dump(mode="json"), indent=2, sort_keys=True)
        (self.out / "effective_config.json").write_text(snapshot + "\n", encoding="utf-8")

    def evaluation_ids(self) -> List[str]:
        """Test-side sample ids in dataset order, optionally subsampled."""
        indices = self.split.test_indices
        limit = self.cfg.max_explain_samples
        if limit is not None and indices.size > limit:
            rng = np.random.default_rng(self.cfg.seed)
            logger.info(f"Evaluating a seeded subsample of {limit} of {indices.size} test samples")
            indices = np.sort(rng.choice(indices, size=limit, replace=False))
        return [self.dataset.sample_ids[i] for i in indices]

    def samples_by_id(self, ids: List[str]) -> Dict[str, np.ndarray]:
        position = {sid: i for i, sid in enumerate(self.dataset.sample_ids)}
        return {sid: self.dataset.samples[position[sid]] for sid in ids}

    def load_index(self) -> ModelIndex:
        path = self.models_dir / "index.json"
        if not path.exists():
            raise ModelError(f"no trained models in {self.models_dir}; run the train command first")
        try:
            index = ModelIndex.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ModelError(f"unreadable model index {path}: {e}") from e
        if index.dictionary_fingerprint != self.dataset.dictionary.fingerprint:
            raise FingerprintMismatchError(
                f"models in {self.models_dir} were trained on another feature dictionary"
            )
        return index

    def load_models(self, model_ids: List[str]) -> Dict[str, ClassifierModel]:
        models = {}
        for model_id in dict.fromkeys(model_ids):
            model = load_model(self.models_dir / f"{model_id}.npz")
            if model.dictionary_fingerprint != self.dataset.dictionary.fingerprint:
                raise FingerprintMismatchError(
                    f"model {model_id} does not match the feature dictionary of {self.name}"
                )
            models[model_id] = model
        return models

    def cached_explanations(self, kind: ExplainerKind, model_id: str, ids: List[str]) -> Dict[str, Explanation]:
        cache = ExplanationCache(self.cache_dir, kind, model_id)
        return {e.sample_id: e for e in cache.require(ids)}


def load_dataset(cfg: ExperimentConfig) -> LabeledDataset:
    """Load the configured CSV or generate the configured synthetic dataset."""
    if cfg.dataset.csv is not None:
        return load_csv(cfg.dataset.csv, sidecar=cfg.dataset.sidecar)
    spec = cfg.synthetic_spec()
    if spec is None:
        raise ConfigError("no dataset source configured")
    return generate_synthetic(spec)


def make_split(cfg: ExperimentConfig, dataset: LabeledDataset) -> Split:
    if cfg.split.policy == "per_class":
        return split_per_class(dataset, cfg.split_seed)
    return split_random(dataset, cfg.split.train_fraction, cfg.split_seed)


def cmd_synth(cfg: ExperimentConfig, spec_path: Optional[str] = None) -> Path:
    """Generate a synthetic dataset and write it in the ingestion CSV format.

    Args:
        cfg: Experiment config (its synthetic section is used without ``spec_path``)
        spec_path: Optional standalone synthetic spec file

    Returns:
        Path of the written CSV
    """
    if spec_path is not None:
        spec = SyntheticSpec.from_file(spec_path)
        name = Path(spec_path).stem
    else:
        cfg.validate_for("synth")
        spec = cfg.synthetic_spec()
        name = cfg.dataset.name
        if spec is None:
            raise ConfigError("synth needs a synthetic dataset section or --spec")

    dataset = generate_synthetic(spec)
    data_dir = Path(cfg.output_dir) / "data"
    path = data_dir / f"{name}.csv"
    write_csv(dataset, path)
    logger.info(f"Wrote {dataset.n} samples to {path}")
    return path


def _ranking_overlap(rankings: List[List[str]]) -> float:
    sets = [set(r) for r in rankings]
    pairs = list(combinations(range(len(sets)), 2))
    dice = [2 * len(sets[a] & sets[b]) / (len(sets[a]) + len(sets[b])) for a, b in pairs]
    return float(np.mean(dice)) if dice else 1.0


def cmd_train(cfg: ExperimentConfig) -> ModelIndex:
    """Train every configured classifier and the similar-model family.

    Writes model files, ``models/index.json``, ``performance.csv``,
    ``feature_ranking.csv`` and ``ranking_overlap.csv``.
    """
    exp = Experiment.prepare(cfg, "train")
    ds, split = exp.dataset, exp.split

    trained: List[ClassifierModel] = []

    def train_once(train_cfg: TrainConfig) -> ClassifierModel:
        # Identical configs give identical models; train each once
        for model in trained:
            if model.config == train_cfg:
                return model
        model = train(ds, split, train_cfg)
        trained.append(model)
        return model

    classifiers = {name: train_once(tc) for name, tc in cfg.classifiers.items()}
    variation = cfg.family.variation
    family = [train_once(tc) for tc in variation.configs(cfg.classifiers[cfg.family.base])]

    for model in trained:
        save_model(model, exp.models_dir / f"{model.model_id}.npz")
    index = ModelIndex(
        dataset=exp.name,
        dictionary_fingerprint=ds.dictionary.fingerprint,
        classifiers={name: m.model_id for name, m in classifiers.items()},
        base_model=cfg.base_model,
        family_base=cfg.family.base,
        family_variation=variation.kind,
        family_values=variation.values,
        family=[m.model_id for m in family],
    )
    exp.models_dir.mkdir(parents=True, exist_ok=True)
    (exp.models_dir / "index.json").write_text(index.model_dump_json(indent=2) + "\n", encoding="utf-8")
    metrics_exporter.set_models_trained(len(trained))

    rows = [
        reports.performance_row(exp.name, name, m.model_id, evaluate(m, ds, split))
        for name, m in classifiers.items()
    ]
    rows += [
        reports.performance_row(exp.name, index.member_name(i), m.model_id, evaluate(m, ds, split))
        for i, m in enumerate(family)
    ]
    reports.write_table(rows, exp.reports_dir / "performance.csv", reports.PERFORMANCE_COLUMNS)

    rankings = {
        index.member_name(i): information_gain_ranking(
            ds, split, RANKING_TOP_N, labels=m.predict_batch(ds.samples)
        )
        for i, m in enumerate(family)
    }
    ranking_rows = []
    for rank in range(RANKING_TOP_N):
        row: Dict[str, Any] = {"rank": rank + 1}
        for member, ranking in rankings.items():
            row[member] = ranking[rank][0] if rank < len(ranking) else ""
        ranking_rows.append(row)
    reports.write_table(
        ranking_rows, exp.reports_dir / "feature_ranking.csv", ["rank"] + list(rankings)
    )
    overlap = _ranking_overlap([[f for f, _ in r] for r in rankings.values()])
    reports.write_table(
        [{"variation": variation.kind, "alpha": len(family), "top_n": RANKING_TOP_N, "ranking_overlap": overlap}],
        exp.reports_dir / "ranking_overlap.csv",
        ["variation", "alpha", "top_n", "ranking_overlap"],
    )
    metrics_exporter.write_textfile(exp.reports_dir / "metrics.prom")
    logger.info(f"Trained {len(trained)} models; family ranking overlap {overlap:.3f}")
    return index


def cmd_explain(cfg: ExperimentConfig) -> Dict[str, int]:
    """Explain every evaluation sample under every needed model and approach.

    Resumable: samples already in a cache with the same parameters are not
    explained again. Returns the number of explanations computed per approach.
    """
    exp = Experiment.prepare(cfg, "explain")
    index = exp.load_index()
    targets = index.explained_models(cfg.cross_classifier)
    models = exp.load_models(targets)
    ids = exp.evaluation_ids()
    samples = exp.samples_by_id(ids)

    computed: Dict[str, int] = {}
    for kind in cfg.explainer_kinds:
        params = cfg.explainer_params(kind)
        params_hash = params.fingerprint()
        computed[kind.value] = 0
        for model_id in targets:
            cache = ExplanationCache(exp.cache_dir, kind, model_id)
            done = cache.load(params_hash)
            if cache.exists():
                # Drop stale or truncated records before appending
                cache.write_all([done[sid] for sid in ids if sid in done])
            jobs = [
                ExplainJob(sid, samples[sid], sample_seed(cfg.seed, sid, model_id))
                for sid in ids
                if sid not in done
            ]
            logger.info(
                f"{kind.value} on model {model_id}: {len(done)} cached, {len(jobs)} to explain"
            )
            for explanation in explain_many(
                models[model_id], kind, params, jobs, workers=cfg.jobs, log_level=cfg.log_level
            ):
                cache.append(explanation)
                metrics_exporter.record_explanation(kind.value, explanation.elapsed, explanation.flags)
                computed[kind.value] += 1
            cache.compact(ids, params_hash)

    metrics_exporter.write_textfile(exp.reports_dir / "metrics.prom")
    return computed


def cmd_metrics(cfg: ExperimentConfig) -> pd.DataFrame:
    """Compute every sanity metric from the caches and write the reports.

    Returns:
        The rows of ``metrics.csv``
    """
    exp = Experiment.prepare(cfg, "metrics")
    index = exp.load_index()
    ids = exp.evaluation_ids()
    samples = exp.samples_by_id(ids)
    kinds = cfg.explainer_kinds
    ks = cfg.k_values
    names = index.scored_classifiers(cfg.cross_classifier)
    models = exp.load_models([index.classifiers[n] for n in names])

    rows: List[Dict[str, Any]] = []
    for kind in kinds:
        family = [exp.cached_explanations(kind, mid, ids) for mid in index.family]
        if len(family) == 2:
            logger.warning("Stability over a two-model family averages a single pair")
        series = stability(family, ks, approach=kind.value)
        rows += series.to_rows(exp.name, index.family_base)

    robustness_table: List[Dict[str, Any]] = []
    approaches = [k.value for k in kinds]
    effective_rows: List[Dict[str, Any]] = []
    size_rows: List[Dict[str, Any]] = []
    for name in names:
        model = models[index.classifiers[name]]
        per_kind = {kind.value: exp.cached_explanations(kind, model.model_id, ids) for kind in kinds}
        breakdowns = {}
        for kind in kinds:
            explanations = per_kind[kind.value]
            rob, by_k = robustness(
                explanations,
                ks,
                neighbor_cap=cfg.neighbor_cap,
                seed=cfg.seed,
                approach=kind.value,
                label_names=exp.dataset.label_names,
            )
            breakdowns[kind.value] = by_k
            rows += rob.to_rows(exp.name, name)
            rows += effectiveness(model, samples, explanations, ks, approach=kind.value).to_rows(exp.name, name)

            weights = effective_feature_weights(model, samples, explanations, cfg.effective_k)
            for rank, (feature, weight) in enumerate(list(weights.items())[:RANKING_TOP_N], start=1):
                effective_rows.append(
                    {
                        "classifier": name,
                        "approach": kind.value,
                        "k": cfg.effective_k,
                        "rank": rank,
                        "feature": exp.dataset.dictionary.names[feature],
                        "weight": weight,
                    }
                )
            lengths = np.array([len(e.items) for e in explanations.values()])
            size_rows.append(
                {
                    "classifier": name,
                    "approach": kind.value,
                    "mean_items": float(lengths.mean()),
                    "min_items": int(lengths.min()),
                    "max_items": int(lengths.max()),
                    "n_explanations": int(lengths.size),
                    "n_empty": int((lengths == 0).sum()),
                }
            )

        if len(kinds) >= 2:
            rows += consistency(per_kind, ks).to_rows(exp.name, name)

        predicted = model.predict_batch(np.vstack([samples[sid] for sid in ids]))
        class_sizes = {int(c): int(n) for c, n in zip(*np.unique(predicted, return_counts=True))}
        robustness_table += reports.robustness_rows(name, breakdowns, class_sizes, exp.dataset.label_names)

    reports.write_table(rows, exp.reports_dir / "metrics.csv", reports.METRIC_COLUMNS)
    reports.write_table(
        robustness_table, exp.reports_dir / "robustness_by_class.csv", reports.robustness_columns(approaches)
    )
    reports.write_table(
        effective_rows,
        exp.reports_dir / "effective_features.csv",
        ["classifier", "approach", "k", "rank", "feature", "weight"],
    )
    reports.write_table(
        size_rows,
        exp.reports_dir / "explanation_sizes.csv",
        ["classifier", "approach", "mean_items", "min_items", "max_items", "n_explanations", "n_empty"],
    )

    metrics = pd.DataFrame(rows, columns=reports.METRIC_COLUMNS)
    performance_path = exp.reports_dir / "performance.csv"
    performance = pd.read_csv(performance_path) if performance_path.exists() else None
    summary = reports.summary_markdown(
        exp.name,
        metrics,
        len(index.family),
        index.family_variation,
        cfg.effective_k,
        performance,
        n_evaluated=len(ids),
        test_size=int(exp.split.test_indices.size),
    )
    (exp.reports_dir / "summary.md").write_text(summary, encoding="utf-8")
    metrics_exporter.write_textfile(exp.reports_dir / "metrics.prom")
    logger.info(f"Wrote {len(rows)} metric rows to {exp.reports_dir / 'metrics.csv'}")
    return metrics


def cmd_bench(cfg: ExperimentConfig) -> pd.DataFrame:
    """Time every approach on a fixed subset of evaluation samples.

    Runs in this process, one sample at a time, against the base model.
    """
    exp = Experiment.prepare(cfg, "bench")
    index = exp.load_index()
    model_id = index.classifiers[index.base_model]
    model = exp.load_models([model_id])[model_id]
    ids = exp.evaluation_ids()[: cfg.bench_samples]
    if not ids:
        raise CacheError("no evaluation samples available to benchmark")
    samples = exp.samples_by_id(ids)

    rows = []
    for kind in cfg.explainer_kinds:
        params = cfg.explainer_params(kind)
        seconds = []
        for sid in ids:
            seed = sample_seed(cfg.seed, sid, model_id)
            explanation = explain(kind, model, samples[sid], params, seed, sid)
            metrics_exporter.record_explanation(kind.value, explanation.elapsed, explanation.flags)
            seconds.append(explanation.elapsed)
        rows.append(
            {
                "approach": kind.value,
                "dataset": exp.name,
                "classifier": index.base_model,
                "mean_seconds": float(np.mean(seconds)),
                "n_samples": len(seconds),
                "total_seconds": float(np.sum(seconds)),
            }
        )
        logger.info(f"{kind.value}: {rows[-1]['mean_seconds']:.4f}s per sample over {len(ids)} samples")

    runtime = pd.DataFrame(rows, columns=reports.RUNTIME_COLUMNS)
    reports.write_table(rows, exp.reports_dir / "runtime.csv", reports.RUNTIME_COLUMNS)
    (exp.reports_dir / "runtime.md").write_text(reports.runtime_markdown(runtime, exp.name), encoding="utf-8")
    metrics_exporter.write_textfile(exp.reports_dir / "metrics.prom")
    return runtime
