"""Benchmark harness: k-fold cross-validation and streaming runs.

Both entry points produce an :class:`EvaluationReport` whose numbers are
fully determined by the run configuration and its seeds.  Wall-clock
times are reported but are the one part of a report that cannot be
reproducible; serialisation can exclude them so reports can be compared
byte for byte.

Split protocol: samples are shuffled once per repetition with a seeded
generator, then cut into contiguous folds.  Folds are not stratified.
The protocol is embedded in every report.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from time import perf_counter

import numpy as np

from .datasets import ClassificationType, Dataset, dataset_stats
from .decision import FallbackPolicy, decide_batch
from .errors import ConfigurationError
from .io import FormatSpec, fit_apply_normalizer, parse_dataset
from .metrics import evaluate_multilabel, single_label_accuracy
from .network import NetworkConfig, OnlineModel, init_block, init_layer, predict_raw, sequential_update

# Initial block size used when none is requested: large enough to condition
# the first solve, never larger than the available training data.
AUTO_BLOCK_FLOOR = 50

# Most trajectory points a streaming report will carry.
MAX_TRAJECTORY_POINTS = 200


@dataclass(frozen=True)
class RunConfig:
    """Everything a benchmark run depends on.

    ``initial_block=None`` resolves per split to
    ``min(train_size, max(n_hidden, 50))``.  ``shuffle_seed=None`` derives
    the shuffle from ``seed``, so one value pins the whole run.
    """

    data_path: str | None = None
    format_spec: FormatSpec | None = None
    n_hidden: int = 40
    activation: str = "sigmoid"
    ridge: float = 1e-6
    seed: int = 0
    initial_block: int | None = None
    chunk_size: int = 1
    folds: int = 10
    repetitions: int = 1
    shuffle_seed: int | None = None
    fallback_mode: str = "argmax"
    output_path: str | None = None

    def __post_init__(self):
        if self.folds < 2:
            raise ConfigurationError(f"folds must be >= 2, got {self.folds}")
        if self.repetitions < 1:
            raise ConfigurationError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.n_hidden < 1:
            raise ConfigurationError(f"n_hidden must be >= 1, got {self.n_hidden}")
        if self.chunk_size < 1:
            raise ConfigurationError(f"chunk size must be >= 1, got {self.chunk_size}")
        if not (self.ridge >= 0.0):
            raise ConfigurationError(f"ridge must be >= 0, got {self.ridge}")
        if self.initial_block is not None and self.initial_block < 1:
            raise ConfigurationError(
                f"initial block size must be >= 1, got {self.initial_block}"
            )
        if self.seed < 0:
            raise ConfigurationError(f"seed must be >= 0, got {self.seed}")
        FallbackPolicy(mode=self.fallback_mode)  # validates the mode

    def base_shuffle_seed(self) -> int:
        return self.seed if self.shuffle_seed is None else self.shuffle_seed

    def as_dict(self) -> dict:
        data = asdict(self)
        if self.format_spec is not None:
            data["format_spec"] = asdict(self.format_spec)
        return data


@dataclass
class EvaluationReport:
    """Structured result of a benchmark run.

    ``folds`` holds one record per evaluated split; ``summary`` holds the
    mean and sample standard deviation of every metric, recomputable from
    the records.  ``trajectory`` is present for streaming runs only.
    """

    kind: str
    config: dict
    dataset: dict
    split: dict
    folds: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    trajectory: list | None = None

    def to_dict(self, include_timing: bool = True) -> dict:
        if include_timing:
            folds = self.folds
        else:
            folds = [
                {k: v for k, v in record.items() if not k.endswith("_time_s")}
                for record in self.folds
            ]
        data = {
            "kind": self.kind,
            "config": self.config,
            "dataset": self.dataset,
            "split": self.split,
            "folds": folds,
            "summary": self.summary,
        }
        if include_timing:
            data["timing"] = self.timing
        if self.trajectory is not None:
            data["trajectory"] = self.trajectory
        return data

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)

    def format_human(self) -> str:
        """Plain-text summary table."""
        lines = [f"{self.kind} report"]
        lines.append(
            "dataset: {n_samples} samples, {n_features} features, "
            "{n_labels} labels ({declared_type})".format(**self.dataset)
        )
        lines.append(
            "split: {protocol}; folds={folds} repetitions={repetitions} "
            "shuffle_seed={shuffle_seed}".format(**self.split)
        )
        lines.append("")
        metric_names = sorted(self.summary["metrics"])
        header = ["fold"] + metric_names + ["train_s", "test_s"]
        rows = [header]
        for record in self.folds:
            rows.append(
                [f"{record['repetition']}/{record['fold']}"]
                + [f"{record['metrics'][m]:.4f}" for m in metric_names]
                + [f"{record['train_time_s']:.4f}", f"{record['test_time_s']:.4f}"]
            )
        summary_row = ["mean±std"]
        for name in metric_names:
            cell = self.summary["metrics"][name]
            summary_row.append(f"{cell['mean']:.4f}±{cell['std']:.4f}")
        summary_row += [
            f"{self.timing['train_time_s']['mean']:.4f}",
            f"{self.timing['test_time_s']['mean']:.4f}",
        ]
        rows.append(summary_row)
        widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
        for row in rows:
            lines.append("  ".join(cell.rjust(width) for cell, width in zip(row, widths)))
        lines.append("")
        lines.append(
            "type identification agreement: "
            f"{self.summary['type_agreement_rate']['mean']:.4f}"
        )
        lines.append(f"fallback usage: {self.summary['fallback_rate']['mean']:.4f}")
        if self.trajectory:
            first, last = self.trajectory[0], self.trajectory[-1]
            lines.append(
                f"stream trajectory: score {first['score']:.4f} after "
                f"{first['samples_seen']} samples -> {last['score']:.4f} after "
                f"{last['samples_seen']}"
            )
        return "\n".join(lines)


def _mean_std(values: list[float]) -> dict:
    array = np.asarray(values, dtype=np.float64)
    std = float(array.std(ddof=1)) if array.size > 1 else 0.0
    return {"mean": float(array.mean()), "std": std}


def resolve_initial_block(requested: int | None, train_size: int, n_hidden: int) -> int:
    if requested is None:
        return min(train_size, max(n_hidden, AUTO_BLOCK_FLOOR))
    if requested > train_size:
        raise ConfigurationError(
            f"initial block of {requested} exceeds the {train_size} training "
            "samples of a split; use a smaller --init-block or fewer folds"
        )
    return requested


def train_streamed(
    config: NetworkConfig, features: np.ndarray, targets: np.ndarray, block: int, chunk: int
) -> tuple[OnlineModel, float, int]:
    """Timed initial solve plus sequential updates over the remainder."""
    layer = init_layer(config)
    started = perf_counter()
    model = init_block(layer, features[:block], targets[:block], config.ridge)
    n_chunks = 0
    for start in range(block, features.shape[0], chunk):
        model = sequential_update(
            model, features[start : start + chunk], targets[start : start + chunk]
        )
        n_chunks += 1
    return model, perf_counter() - started, n_chunks


def _score_details(dataset: Dataset, details, declared: ClassificationType) -> dict:
    if declared is ClassificationType.MULTILABEL:
        result = evaluate_multilabel(
            dataset.label_sets(), [p.labels for p in details], dataset.n_labels
        )
        return result.as_dict()
    true_indices = np.argmax(dataset.targets, axis=1)
    predicted = [next(iter(p.labels)) for p in details]
    return {"accuracy": single_label_accuracy(true_indices, predicted)}


def _agreement_rate(details, declared: ClassificationType) -> float:
    return float(
        np.mean([d.in_table and d.identified_type is declared for d in details])
    )


def _fallback_rate(details) -> float:
    return float(np.mean([d.fallback_used for d in details]))


def _evaluate_split(
    cfg: RunConfig,
    train: Dataset,
    test: Dataset,
    declared: ClassificationType,
    network_seed: int,
) -> dict:
    """Normalize, train on the (already ordered) training set, score the test set."""
    _, train_scaled, test_scaled = fit_apply_normalizer(train, test)
    block = resolve_initial_block(cfg.initial_block, len(train), cfg.n_hidden)
    network = NetworkConfig(
        n_hidden=cfg.n_hidden,
        input_dim=train.n_features,
        output_dim=train.n_labels,
        activation=cfg.activation,
        ridge=cfg.ridge,
        seed=network_seed,
    )
    model, train_time, n_chunks = train_streamed(
        network, train_scaled.features, train_scaled.targets, block, cfg.chunk_size
    )
    policy = FallbackPolicy(mode=cfg.fallback_mode, declared_type=declared)
    started = perf_counter()
    raw = predict_raw(model, test_scaled.features)
    details = decide_batch(raw, policy)
    test_time = perf_counter() - started
    return {
        "n_train": len(train),
        "n_test": len(test),
        "initial_block": block,
        "n_chunks": n_chunks,
        "metrics": _score_details(test_scaled, details, declared),
        "type_agreement_rate": _agreement_rate(details, declared),
        "fallback_rate": _fallback_rate(details),
        "train_time_s": train_time,
        "test_time_s": test_time,
    }


def _summarize(records: list[dict]) -> tuple[dict, dict]:
    metric_names = sorted(records[0]["metrics"])
    summary = {
        "metrics": {
            name: _mean_std([r["metrics"][name] for r in records])
            for name in metric_names
        },
        "type_agreement_rate": _mean_std([r["type_agreement_rate"] for r in records]),
        "fallback_rate": _mean_std([r["fallback_rate"] for r in records]),
    }
    timing = {}
    for key in ("train_time_s", "test_time_s"):
        values = [r[key] for r in records]
        timing[key] = _mean_std(values) | {"total": float(np.sum(values))}
    return summary, timing


def _load(cfg: RunConfig, dataset: Dataset | None) -> Dataset:
    if dataset is not None:
        return dataset
    if cfg.data_path is None or cfg.format_spec is None:
        raise ConfigurationError("a dataset (or data path plus format) is required")
    return parse_dataset(cfg.data_path, cfg.format_spec)


def _report_skeleton(kind: str, cfg: RunConfig, dataset: Dataset, protocol: str) -> EvaluationReport:
    stats = dataset_stats(dataset)
    return EvaluationReport(
        kind=kind,
        config=cfg.as_dict(),
        dataset=stats.as_dict() | {"declared_type": str(dataset.effective_type())},
        split={
            "protocol": protocol,
            "folds": cfg.folds,
            "repetitions": cfg.repetitions,
            "shuffle_seed": cfg.base_shuffle_seed(),
            "normalization": "feature range to [-1, 1], fitted on train only",
        },
    )


def run_kfold(cfg: RunConfig, dataset: Dataset | None = None) -> EvaluationReport:
    """Cross-validate: seeded shuffle, contiguous folds, one model per fold.

    Each repetition reshuffles with ``shuffle_seed + repetition``.  Within
    a repetition every fold trains a fresh model on the other folds
    (initial block plus chunked updates) and is scored on the held-out
    fold with the metric family of the dataset's problem type.
    """
    data = _load(cfg, dataset)
    if len(data) // cfg.folds < 1:
        raise ConfigurationError(
            f"{cfg.folds} folds need at least {cfg.folds} samples, got {len(data)}"
        )
    declared = data.effective_type()
    report = _report_skeleton("kfold", cfg, data, "seeded shuffle, contiguous folds")

    for repetition in range(cfg.repetitions):
        order = np.random.default_rng(
            cfg.base_shuffle_seed() + repetition
        ).permutation(len(data))
        fold_slices = np.array_split(np.arange(len(data)), cfg.folds)
        for fold_index, test_positions in enumerate(fold_slices):
            test_indices = order[test_positions]
            train_indices = np.concatenate(
                [order[s] for j, s in enumerate(fold_slices) if j != fold_index]
            )
            record = _evaluate_split(
                cfg,
                data.subset(train_indices),
                data.subset(test_indices),
                declared,
                network_seed=cfg.seed + repetition,
            )
            report.folds.append({"repetition": repetition, "fold": fold_index} | record)

    report.summary, report.timing = _summarize(report.folds)
    return report


def run_stream_benchmark(cfg: RunConfig, dataset: Dataset | None = None) -> EvaluationReport:
    """Single split streaming run with timing and a learning trajectory.

    One fold's worth of data (1/folds) is held out; the rest streams
    through the model in chunks.  After the initial block and at up to
    ``MAX_TRAJECTORY_POINTS`` chunk boundaries the held-out score is
    recorded (outside the timed sections), demonstrating how the model
    improves as data arrives.
    """
    data = _load(cfg, dataset)
    if len(data) < 2 or len(data) // cfg.folds < 1:
        raise ConfigurationError(
            f"need at least {max(2, cfg.folds)} samples for a held-out split, got {len(data)}"
        )
    declared = data.effective_type()
    report = _report_skeleton(
        "stream-benchmark", cfg, data, "seeded shuffle, single held-out split"
    )

    order = np.random.default_rng(cfg.base_shuffle_seed()).permutation(len(data))
    holdout = max(1, len(data) // cfg.folds)
    test_set = data.subset(order[:holdout])
    train_set = data.subset(order[holdout:])
    _, train_scaled, test_scaled = fit_apply_normalizer(train_set, test_set)

    block = resolve_initial_block(cfg.initial_block, len(train_set), cfg.n_hidden)
    network = NetworkConfig(
        n_hidden=cfg.n_hidden,
        input_dim=data.n_features,
        output_dim=data.n_labels,
        activation=cfg.activation,
        ridge=cfg.ridge,
        seed=cfg.seed,
    )
    policy = FallbackPolicy(mode=cfg.fallback_mode, declared_type=declared)

    def holdout_score(model: OnlineModel) -> float:
        details = decide_batch(predict_raw(model, test_scaled.features), policy)
        metrics = _score_details(test_scaled, details, declared)
        return metrics["accuracy"]

    layer = init_layer(network)
    features, targets = train_scaled.features, train_scaled.targets
    starts = list(range(block, features.shape[0], cfg.chunk_size))
    checkpoint_every = max(1, -(-len(starts) // MAX_TRAJECTORY_POINTS))

    started = perf_counter()
    model = init_block(layer, features[:block], targets[:block], cfg.ridge)
    train_time = perf_counter() - started
    trajectory = [{"samples_seen": block, "score": holdout_score(model)}]

    for index, start in enumerate(starts):
        begun = perf_counter()
        model = sequential_update(
            model, features[start : start + cfg.chunk_size], targets[start : start + cfg.chunk_size]
        )
        train_time += perf_counter() - begun
        if index % checkpoint_every == 0 or index == len(starts) - 1:
            trajectory.append(
                {"samples_seen": model.samples_seen, "score": holdout_score(model)}
            )

    started = perf_counter()
    raw = predict_raw(model, test_scaled.features)
    details = decide_batch(raw, policy)
    test_time = perf_counter() - started

    record = {
        "repetition": 0,
        "fold": 0,
        "n_train": len(train_set),
        "n_test": len(test_set),
        "initial_block": block,
        "n_chunks": len(starts),
        "metrics": _score_details(test_scaled, details, declared),
        "type_agreement_rate": _agreement_rate(details, declared),
        "fallback_rate": _fallback_rate(details),
        "train_time_s": train_time,
        "test_time_s": test_time,
    }
    report.folds.append(record)
    report.summary, report.timing = _summarize(report.folds)
    report.trajectory = trajectory
    return report
