"""Dataset file formats, feature normalization and stream chunking.

Three on-disk formats are supported, covering the families public corpora
ship in:

* ``dense``: comma-separated numeric features with a single class column
  (leading or trailing) holding one class token per sample; an optional
  header line is auto-detected.
* ``arff``: attribute declarations followed by a ``@data`` section of
  comma-separated rows; the last ``L`` attributes are 0/1 labels.
* ``sparse``: per line, comma-separated 1-based label indices, a space,
  then space-separated 1-based ``index:value`` feature pairs.

All parsers enforce their grammar strictly and report line numbers on
failure.  Missing values are rejected, never imputed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .datasets import ClassificationType, Dataset, encode_labels
from .errors import (
    ConfigurationError,
    DataError,
    EncodingError,
    ParseError,
    SchemaError,
)

FORMATS = ("dense", "arff", "sparse")
LABEL_POSITIONS = ("trailing", "leading")


@dataclass(frozen=True)
class FormatSpec:
    """Which grammar a dataset file follows.

    ``n_labels`` is required for the multi-label formats; for ``dense``
    files it is inferred from the distinct class tokens and, when given,
    checked against them.  ``label_position`` applies to ``dense`` only.
    """

    kind: str = "dense"
    n_labels: int | None = None
    label_position: str = "trailing"

    def __post_init__(self):
        if self.kind not in FORMATS:
            raise ConfigurationError(
                f"unknown format {self.kind!r}; expected one of {FORMATS}"
            )
        if self.label_position not in LABEL_POSITIONS:
            raise ConfigurationError(
                f"unknown label position {self.label_position!r}; "
                f"expected one of {LABEL_POSITIONS}"
            )
        if self.n_labels is not None and self.n_labels < 2:
            raise ConfigurationError(f"n_labels must be >= 2, got {self.n_labels}")
        if self.kind in ("arff", "sparse") and self.n_labels is None:
            raise ConfigurationError(f"{self.kind} format requires n_labels")


def _read_lines(path) -> list[str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"dataset file not found: {path}") from None
    except OSError as exc:
        raise DataError(f"cannot read dataset file {path}: {exc}") from None
    return text.splitlines()


def _parse_float(token: str, line: int, what: str) -> float:
    token = token.strip()
    if token in ("", "?"):
        raise ParseError(f"missing {what} value", line)
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"bad {what} value {token!r}", line) from None
    if not np.isfinite(value):
        raise ParseError(f"non-finite {what} value {token!r}", line)
    return value


def _parse_dense(lines: list[str], spec: FormatSpec) -> Dataset:
    rows: list[tuple[int, list[str]]] = []
    for number, raw in enumerate(lines, start=1):
        if raw.strip():
            rows.append((number, [cell.strip() for cell in raw.split(",")]))
    if not rows:
        raise SchemaError("no data rows")

    arity = len(rows[0][1])
    if arity < 2:
        raise SchemaError("dense rows need at least one feature and a class column")
    class_at = 0 if spec.label_position == "leading" else arity - 1

    def feature_cells(cells: list[str]) -> list[str]:
        return cells[:class_at] + cells[class_at + 1 :]

    # A header is any first row whose feature fields are not all numeric.
    first_features = feature_cells(rows[0][1])
    header = False
    for cell in first_features:
        try:
            float(cell)
        except ValueError:
            header = True
            break
    if header:
        rows = rows[1:]
        if not rows:
            raise SchemaError("no data rows after header")

    features: list[list[float]] = []
    class_tokens: list[str] = []
    for number, cells in rows:
        if len(cells) != arity:
            raise SchemaError(f"line {number}: expected {arity} fields, got {len(cells)}")
        token = cells[class_at]
        if token in ("", "?"):
            raise ParseError("missing class value", number)
        class_tokens.append(token)
        features.append(
            [_parse_float(cell, number, "feature") for cell in feature_cells(cells)]
        )

    names = sorted(set(class_tokens))
    if spec.n_labels is not None and spec.n_labels != len(names):
        raise SchemaError(
            f"declared {spec.n_labels} classes but file has {len(names)}: {names}"
        )
    if len(names) < 2:
        raise SchemaError(f"need at least 2 classes, found {names}")
    index_of = {name: i for i, name in enumerate(names)}
    targets = np.vstack(
        [encode_labels({index_of[token]}, len(names)) for token in class_tokens]
    )
    declared = (
        ClassificationType.BINARY if len(names) == 2 else ClassificationType.MULTICLASS
    )
    return Dataset(np.asarray(features), targets, label_names=names, declared_type=declared)


def _split_attribute(line: str, number: int) -> str:
    """Attribute name from an ``@attribute`` declaration (quoted or bare)."""
    rest = line[len("@attribute") :].strip()
    if not rest:
        raise ParseError("attribute declaration without a name", number)
    if rest[0] in "'\"":
        quote = rest[0]
        end = rest.find(quote, 1)
        if end < 0:
            raise ParseError("unterminated quoted attribute name", number)
        return rest[1:end]
    return rest.split()[0]


def _parse_arff(lines: list[str], spec: FormatSpec) -> Dataset:
    n_labels = spec.n_labels
    attributes: list[str] = []
    data_rows: list[tuple[int, str]] = []
    in_data = False
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            data_rows.append((number, line))
            continue
        lowered = line.lower()
        if lowered.startswith("@relation"):
            continue
        if lowered.startswith("@attribute"):
            attributes.append(_split_attribute(line, number))
            continue
        if lowered.startswith("@data"):
            in_data = True
            continue
        raise ParseError(f"unexpected line before @data: {line!r}", number)

    if not in_data:
        raise SchemaError("no @data section")
    if len(attributes) <= n_labels:
        raise SchemaError(
            f"{len(attributes)} attributes cannot hold {n_labels} trailing labels"
        )
    if not data_rows:
        raise SchemaError("no data rows")
    n_features = len(attributes) - n_labels

    features: list[list[float]] = []
    targets: list[np.ndarray] = []
    for number, line in data_rows:
        if line.startswith("{"):
            raise ParseError(
                "sparse attribute-relation rows are not supported; "
                "use the sparse format instead",
                number,
            )
        cells = [cell.strip() for cell in line.split(",")]
        if len(cells) != len(attributes):
            raise SchemaError(
                f"line {number}: expected {len(attributes)} fields, got {len(cells)}"
            )
        features.append(
            [_parse_float(cell, number, "feature") for cell in cells[:n_features]]
        )
        members = set()
        for offset, cell in enumerate(cells[n_features:]):
            if cell == "1":
                members.add(offset)
            elif cell != "0":
                raise ParseError(f"label value must be 0 or 1, got {cell!r}", number)
        targets.append(encode_labels(members, n_labels))

    return Dataset(
        np.asarray(features),
        np.vstack(targets),
        label_names=attributes[n_features:],
        declared_type=ClassificationType.MULTILABEL,
    )


def _parse_sparse(lines: list[str], spec: FormatSpec) -> Dataset:
    n_labels = spec.n_labels
    parsed: list[tuple[set[int], dict[int, float]]] = []
    max_index = 0
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        members: set[int] = set()
        start = 0
        if ":" not in tokens[0]:
            for piece in tokens[0].split(","):
                if not piece:
                    raise ParseError("empty label index", number)
                try:
                    index = int(piece)
                except ValueError:
                    raise ParseError(f"bad label index {piece!r}", number) from None
                if index < 1 or index > n_labels:
                    raise EncodingError(
                        f"line {number}: label index {index} outside [1, {n_labels}]"
                    )
                members.add(index - 1)
            start = 1
        values: dict[int, float] = {}
        for token in tokens[start:]:
            left, sep, right = token.partition(":")
            if not sep:
                raise ParseError(f"expected index:value pair, got {token!r}", number)
            try:
                index = int(left)
            except ValueError:
                raise ParseError(f"bad feature index {left!r}", number) from None
            if index < 1:
                raise ParseError(f"feature indices are 1-based, got {index}", number)
            if index in values:
                raise ParseError(f"duplicate feature index {index}", number)
            values[index] = _parse_float(right, number, "feature")
        parsed.append((members, values))
        if values:
            max_index = max(max_index, max(values))

    if not parsed:
        raise SchemaError("no data rows")
    if max_index == 0:
        raise SchemaError("cannot infer feature dimension: no feature pairs in file")

    features = np.zeros((len(parsed), max_index))
    targets = np.vstack([encode_labels(members, n_labels) for members, _ in parsed])
    for row, (_, values) in enumerate(parsed):
        for index, value in values.items():
            features[row, index - 1] = value
    return Dataset(features, targets, declared_type=ClassificationType.MULTILABEL)


def parse_dataset(path, spec: FormatSpec) -> Dataset:
    """Read a dataset file according to its format specification."""
    lines = _read_lines(path)
    if spec.kind == "dense":
        return _parse_dense(lines, spec)
    if spec.kind == "arff":
        return _parse_arff(lines, spec)
    return _parse_sparse(lines, spec)


def write_dense(dataset: Dataset, path, label_position: str = "trailing") -> None:
    """Serialize a single-label dataset as dense rows.

    Floats are written with ``repr`` so a parse round trip reproduces them
    to 64-bit equality.
    """
    if label_position not in LABEL_POSITIONS:
        raise ConfigurationError(f"unknown label position {label_position!r}")
    if dataset.targets is None:
        raise DataError("cannot serialize an unlabelled dataset")
    lines = []
    for row in range(len(dataset)):
        labels = sorted(np.flatnonzero(dataset.targets[row] == 1.0))
        if len(labels) != 1:
            raise DataError(
                f"sample {row} has {len(labels)} labels; dense format holds exactly one"
            )
        cells = [repr(float(value)) for value in dataset.features[row]]
        token = dataset.label_names[labels[0]]
        if label_position == "leading":
            cells.insert(0, token)
        else:
            cells.append(token)
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_arff(dataset: Dataset, path, relation: str = "data") -> None:
    """Serialize a dataset as attribute-relation rows with trailing labels."""
    if dataset.targets is None:
        raise DataError("cannot serialize an unlabelled dataset")
    lines = [f"@relation {relation}", ""]
    for i in range(dataset.n_features):
        lines.append(f"@attribute feature_{i + 1} numeric")
    for name in dataset.label_names:
        lines.append(f"@attribute {name} {{0,1}}")
    lines.append("@data")
    for row in range(len(dataset)):
        cells = [repr(float(value)) for value in dataset.features[row]]
        cells += ["1" if value == 1.0 else "0" for value in dataset.targets[row]]
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_sparse(dataset: Dataset, path) -> None:
    """Serialize a dataset as sparse label/feature lines (1-based indices)."""
    if dataset.targets is None:
        raise DataError("cannot serialize an unlabelled dataset")
    lines = []
    for row in range(len(dataset)):
        members = sorted(np.flatnonzero(dataset.targets[row] == 1.0))
        tokens = []
        if members:
            tokens.append(",".join(str(i + 1) for i in members))
        for col in np.flatnonzero(dataset.features[row] != 0.0):
            tokens.append(f"{col + 1}:{float(dataset.features[row][col])!r}")
        lines.append(" ".join(tokens))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


class RangeScaler(TransformerMixin, BaseEstimator):
    """Affine map sending each feature's training range onto [-1, 1].

    Constant features map to 0.  Values outside the training range are
    extended by the same affine map, never clipped, so leakage from test
    data cannot hide behind saturation.
    """

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        self.data_min_ = X.min(axis=0)
        self.data_max_ = X.max(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "data_min_")
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        if X.shape[1] != self.n_features_in_:
            raise DataError(
                f"features have {X.shape[1]} columns, scaler was fitted on "
                f"{self.n_features_in_}"
            )
        span = self.data_max_ - self.data_min_
        constant = span == 0
        safe_span = np.where(constant, 1.0, span)
        scaled = -1.0 + 2.0 * (X - self.data_min_) / safe_span
        scaled[:, constant] = 0.0
        return scaled


def fit_apply_normalizer(train: Dataset, *others: Dataset):
    """Fit a scaler on the training features and apply it everywhere.

    Returns the fitted scaler followed by the rescaled datasets, training
    set first.  Only the training set determines the map.
    """
    scaler = RangeScaler().fit(train.features)
    rescaled = [train.with_features(scaler.transform(train.features))]
    rescaled += [d.with_features(scaler.transform(d.features)) for d in others]
    return (scaler, *rescaled)


def chunk_stream(
    dataset: Dataset,
    initial_size: int,
    chunk_size: int,
    shuffle_seed: int | None = None,
) -> tuple[Dataset, list[Dataset]]:
    """Split a dataset into an initial block and a stream of chunks.

    With a seed the samples are shuffled first; either way the initial
    block and the concatenated chunks partition the (possibly shuffled)
    dataset in order.  The last chunk may be smaller than ``chunk_size``.
    """
    if initial_size < 1:
        raise ConfigurationError(f"initial block size must be >= 1, got {initial_size}")
    if chunk_size < 1:
        raise ConfigurationError(f"chunk size must be >= 1, got {chunk_size}")
    total = len(dataset)
    if initial_size >= total:
        raise ConfigurationError(
            f"initial block of {initial_size} uses all {total} samples; nothing to stream"
        )
    if shuffle_seed is not None:
        order = np.random.default_rng(shuffle_seed).permutation(total)
    else:
        order = np.arange(total)
    initial = dataset.subset(order[:initial_size])
    chunks = [
        dataset.subset(order[start : start + chunk_size])
        for start in range(initial_size, total, chunk_size)
    ]
    return initial, chunks
