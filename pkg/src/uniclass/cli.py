"""Command line interface.

Verbs: ``train``, ``predict``, ``kfold``, ``stream-bench``, ``stats``,
``inspect-model``.  Exit codes: 0 success, 2 configuration error, 3 data
error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .datasets import ClassificationType, Dataset, dataset_stats
from .decision import FallbackPolicy, decide_batch
from .errors import DataError, EncodingError, SchemaError, UniclassError
from .harness import (
    RunConfig,
    resolve_initial_block,
    run_kfold,
    run_stream_benchmark,
    train_streamed,
)
from .io import FORMATS, LABEL_POSITIONS, FormatSpec, fit_apply_normalizer, parse_dataset
from .metrics import evaluate_multilabel, single_label_accuracy
from .network import ACTIVATIONS, NetworkConfig, predict_raw
from .persistence import FORMAT_VERSION, load_model, save_model


def _add_data_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="dataset file")
    parser.add_argument(
        "--format", default="dense", choices=FORMATS, help="dataset file format"
    )
    parser.add_argument(
        "--labels", type=int, default=None, metavar="L",
        help="label-space size (required for arff/sparse; checked for dense)",
    )
    parser.add_argument(
        "--label-position", default="trailing", choices=LABEL_POSITIONS,
        help="where the dense class column sits",
    )


def _add_network_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--hidden", type=int, default=40, help="hidden units")
    parser.add_argument(
        "--activation", default="sigmoid", choices=sorted(ACTIVATIONS),
        help="hidden activation",
    )
    parser.add_argument("--ridge", type=float, default=1e-6, help="regularisation")
    parser.add_argument(
        "--init-block", type=int, default=None, metavar="N0",
        help="initial block size (default: min(train size, max(hidden, 50)))",
    )
    parser.add_argument("--chunk", type=int, default=1, metavar="C", help="stream chunk size")
    parser.add_argument("--seed", type=int, default=0, help="seed for weights and shuffling")
    parser.add_argument(
        "--fallback", default="argmax", choices=("argmax", "empty"),
        help="resolution of all-negative multi-label outputs",
    )


def _format_spec(args: argparse.Namespace) -> FormatSpec:
    return FormatSpec(
        kind=args.format, n_labels=args.labels, label_position=args.label_position
    )


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        data_path=args.data,
        format_spec=_format_spec(args),
        n_hidden=args.hidden,
        activation=args.activation,
        ridge=args.ridge,
        seed=args.seed,
        initial_block=args.init_block,
        chunk_size=args.chunk,
        folds=getattr(args, "folds", 10),
        repetitions=getattr(args, "repetitions", 1),
        fallback_mode=args.fallback,
        output_path=args.out,
    )


def _write_json(path: str, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text + ("" if text.endswith("\n") else "\n"))


def _cmd_train(args: argparse.Namespace) -> int:
    data = parse_dataset(args.data, _format_spec(args))
    declared = data.effective_type()
    scaler, scaled = fit_apply_normalizer(data)
    block = resolve_initial_block(args.init_block, len(data), args.hidden)
    config = NetworkConfig(
        n_hidden=args.hidden,
        input_dim=data.n_features,
        output_dim=data.n_labels,
        activation=args.activation,
        ridge=args.ridge,
        seed=args.seed,
    )
    model, train_time, n_chunks = train_streamed(
        config, scaled.features, scaled.targets, block, args.chunk
    )
    save_model(
        model,
        config,
        args.out,
        label_names=data.label_names,
        declared_type=declared,
        fallback_mode=args.fallback,
        scaler=scaler,
    )
    print(
        f"trained on {len(data)} samples ({data.n_features} features, "
        f"{data.n_labels} labels, {declared}) in {train_time:.4f}s "
        f"(initial block {block}, {n_chunks} chunks of {args.chunk})"
    )
    print(f"model written to {args.out}")
    return 0


def _align_targets(data: Dataset, label_names: tuple[str, ...]) -> Dataset:
    """Re-express a dataset's labels in a model's label space, by name."""
    if data.label_names == tuple(label_names):
        return data
    index_of = {name: i for i, name in enumerate(label_names)}
    unknown = [name for name in data.label_names if name not in index_of]
    if unknown:
        raise EncodingError(
            f"dataset classes {unknown} are not among the model's labels {list(label_names)}"
        )
    targets = np.full((len(data), len(label_names)), -1.0)
    for row, members in enumerate(data.label_sets()):
        for index in members:
            targets[row, index_of[data.label_names[index]]] = 1.0
    return Dataset(data.features, targets, label_names=label_names)


def _cmd_predict(args: argparse.Namespace) -> int:
    bundle = load_model(args.model)
    data = parse_dataset(args.data, _format_spec(args))
    if data.n_features != bundle.config.input_dim:
        raise SchemaError(
            f"dataset has {data.n_features} features, model expects "
            f"{bundle.config.input_dim}"
        )
    if bundle.label_names is not None:
        data = _align_targets(data, bundle.label_names)
    elif data.n_labels != bundle.config.output_dim:
        raise SchemaError(
            f"dataset has {data.n_labels} labels, model expects {bundle.config.output_dim}"
        )

    features = data.features
    if bundle.scaler is not None:
        features = bundle.scaler.transform(features)
    fallback = args.fallback if args.fallback is not None else (bundle.fallback_mode or "argmax")
    policy = FallbackPolicy(mode=fallback, declared_type=bundle.declared_type)
    details = decide_batch(predict_raw(bundle.model, features), policy)

    names = bundle.label_names or data.label_names
    rows = []
    for index, prediction in enumerate(details):
        members = sorted(prediction.labels)
        rows.append(
            {
                "index": index,
                "labels": [names[i] for i in members],
                "label_indices": members,
                "classification_type": str(prediction.classification_type),
                "identified_type": str(prediction.identified_type),
                "n_positive": prediction.n_positive,
                "fallback_used": prediction.fallback_used,
            }
        )

    declared = bundle.declared_type or data.effective_type()
    if declared is ClassificationType.MULTILABEL:
        metrics = evaluate_multilabel(
            data.label_sets(), [p.labels for p in details], data.n_labels
        ).as_dict()
    else:
        metrics = {
            "accuracy": single_label_accuracy(
                np.argmax(data.targets, axis=1),
                [next(iter(p.labels)) for p in details],
            )
        }

    for row in rows:
        label_text = ",".join(row["labels"]) if row["labels"] else "(none)"
        marker = " [fallback]" if row["fallback_used"] else ""
        print(f"{row['index']}\t{label_text}{marker}")
    print("metrics: " + ", ".join(f"{k}={v:.4f}" for k, v in sorted(metrics.items())))
    if args.out:
        _write_json(args.out, {"predictions": rows, "metrics": metrics})
    return 0


def _cmd_kfold(args: argparse.Namespace) -> int:
    report = run_kfold(_run_config(args))
    print(report.format_human())
    if args.out:
        _write_json(args.out, report.to_json())
    return 0


def _cmd_stream_bench(args: argparse.Namespace) -> int:
    report = run_stream_benchmark(_run_config(args))
    print(report.format_human())
    if args.out:
        _write_json(args.out, report.to_json())
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    data = parse_dataset(args.data, _format_spec(args))
    stats = dataset_stats(data)
    payload = stats.as_dict() | {"declared_type": str(data.effective_type())}
    print(
        f"samples {stats.n_samples}  features {stats.n_features}  "
        f"labels {stats.n_labels}  cardinality {stats.label_cardinality:.2f}  "
        f"density {stats.label_density:.3f}  type {payload['declared_type']}"
    )
    if args.out:
        _write_json(args.out, payload)
    return 0


def _cmd_inspect_model(args: argparse.Namespace) -> int:
    bundle = load_model(args.model)
    payload = {
        "format_version": FORMAT_VERSION,
        "n_hidden": bundle.config.n_hidden,
        "input_dim": bundle.config.input_dim,
        "output_dim": bundle.config.output_dim,
        "activation": bundle.config.activation,
        "ridge": bundle.config.ridge,
        "seed": bundle.config.seed,
        "samples_seen": bundle.model.samples_seen,
        "label_names": list(bundle.label_names) if bundle.label_names else None,
        "declared_type": str(bundle.declared_type) if bundle.declared_type else None,
        "fallback_mode": bundle.fallback_mode,
        "has_scaler": bundle.scaler is not None,
    }
    for key, value in payload.items():
        print(f"{key}: {value}")
    if args.out:
        _write_json(args.out, payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uniclass",
        description=(
            "streaming universal classifier: one online least-squares model "
            "for binary, multi-class and multi-label problems"
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", help="train on a dataset file and save the model")
    _add_data_arguments(train)
    _add_network_arguments(train)
    train.add_argument("--out", required=True, help="where to write the model")
    train.set_defaults(handler=_cmd_train)

    predict = commands.add_parser("predict", help="apply a saved model to a dataset file")
    predict.add_argument("--model", required=True, help="saved model file")
    _add_data_arguments(predict)
    predict.add_argument(
        "--fallback", default=None, choices=("argmax", "empty"),
        help="override the fallback mode stored with the model",
    )
    predict.add_argument("--out", default=None, help="write predictions as JSON")
    predict.set_defaults(handler=_cmd_predict)

    kfold = commands.add_parser("kfold", help="k-fold cross-validation benchmark")
    _add_data_arguments(kfold)
    _add_network_arguments(kfold)
    kfold.add_argument("--folds", type=int, default=10, help="number of folds")
    kfold.add_argument("--repetitions", type=int, default=1, help="shuffled repetitions")
    kfold.add_argument("--out", default=None, help="write the report as JSON")
    kfold.set_defaults(handler=_cmd_kfold)

    bench = commands.add_parser(
        "stream-bench", help="single-split streaming benchmark with timing"
    )
    _add_data_arguments(bench)
    _add_network_arguments(bench)
    bench.add_argument(
        "--folds", type=int, default=10, help="holdout fraction is 1/folds"
    )
    bench.add_argument("--out", default=None, help="write the report as JSON")
    bench.set_defaults(handler=_cmd_stream_bench)

    stats = commands.add_parser("stats", help="print dataset statistics")
    _add_data_arguments(stats)
    stats.add_argument("--out", default=None, help="write statistics as JSON")
    stats.set_defaults(handler=_cmd_stats)

    inspect = commands.add_parser("inspect-model", help="describe a saved model")
    inspect.add_argument("--model", required=True, help="saved model file")
    inspect.add_argument("--out", default=None, help="write the description as JSON")
    inspect.set_defaults(handler=_cmd_inspect_model)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except UniclassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
