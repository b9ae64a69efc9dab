"""Core data containers: label encoding, datasets and their statistics.

Labels are handled in a single representation regardless of the problem
family: a sample's labels form a set of 0-based indices into a fixed label
space of size ``L``, stored numerically as a bipolar vector with ``+1`` at
member indices and ``-1`` elsewhere.  Binary and multi-class problems are
the special case of exactly one member; multi-label problems allow any
subset.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    DataError,
    EncodingError,
    SchemaError,
    StateError,
    StatisticsError,
)


class ClassificationType(Enum):
    """Problem family a dataset or prediction belongs to."""

    BINARY = "binary"
    MULTICLASS = "multiclass"
    MULTILABEL = "multilabel"

    def __str__(self) -> str:
        return self.value


def encode_labels(raw_labels: Iterable[int], n_labels: int) -> np.ndarray:
    """Encode a set of 0-based label indices as a bipolar vector.

    Parameters
    ----------
    raw_labels : iterable of int
        Indices of the labels the sample belongs to.  May be empty.
    n_labels : int
        Size of the label space; must be at least 2.

    Returns
    -------
    numpy.ndarray
        Float vector of length ``n_labels`` with ``+1`` at member indices
        and ``-1`` everywhere else.
    """
    if n_labels < 2:
        raise ConfigurationError(f"label space must have at least 2 labels, got {n_labels}")
    vector = np.full(n_labels, -1.0)
    for index in raw_labels:
        index = int(index)
        if index < 0 or index >= n_labels:
            raise EncodingError(
                f"label index {index} outside label space [0, {n_labels})"
            )
        vector[index] = 1.0
    return vector


def decode_labels(vector: np.ndarray) -> frozenset[int]:
    """Return the set of member indices of a bipolar label vector."""
    vector = np.asarray(vector, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] < 2:
        raise EncodingError(f"label vector must be 1-d with length >= 2, got shape {vector.shape}")
    if not np.isin(vector, (-1.0, 1.0)).all():
        raise EncodingError("label vector entries must be -1 or +1")
    return frozenset(int(i) for i in np.flatnonzero(vector == 1.0))


@dataclass(frozen=True)
class Sample:
    """A single observation: feature vector plus an optional label set."""

    features: np.ndarray
    labels: frozenset[int] | None


@dataclass(frozen=True)
class DatasetStats:
    """Summary statistics of a labelled dataset."""

    n_labels: int
    n_features: int
    n_samples: int
    label_cardinality: float
    label_density: float

    def as_dict(self) -> dict:
        return {
            "n_labels": self.n_labels,
            "n_features": self.n_features,
            "n_samples": self.n_samples,
            "label_cardinality": self.label_cardinality,
            "label_density": self.label_density,
        }


class Dataset:
    """An ordered collection of samples backed by dense arrays.

    Parameters
    ----------
    features : array-like of shape (n_samples, n_features)
        Feature matrix; all entries must be finite.
    targets : array-like of shape (n_samples, n_labels), optional
        Bipolar label matrix (entries ``-1``/``+1``).  ``None`` for
        unlabelled data.
    label_names : sequence of str, optional
        Human-readable name per label; synthesized when omitted.
    declared_type : ClassificationType, optional
        Problem family the data source claims.  When given it is checked
        against the targets.
    """

    def __init__(
        self,
        features,
        targets=None,
        label_names: Sequence[str] | None = None,
        declared_type: ClassificationType | None = None,
    ):
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2:
            raise DataError(f"features must be 2-d, got shape {features.shape}")
        if features.size and not np.isfinite(features).all():
            raise DataError("features contain non-finite values")
        self._features = features
        self._features.flags.writeable = False

        if targets is not None:
            targets = np.asarray(targets, dtype=np.float64)
            if targets.ndim != 2 or targets.shape[0] != features.shape[0]:
                raise DataError(
                    f"targets shape {targets.shape} does not match "
                    f"{features.shape[0]} samples"
                )
            if targets.shape[1] < 2:
                raise SchemaError(f"label space must have at least 2 labels, got {targets.shape[1]}")
            if targets.size and not np.isin(targets, (-1.0, 1.0)).all():
                raise DataError("target entries must be -1 or +1")
            targets.flags.writeable = False
        self._targets = targets

        n_labels = targets.shape[1] if targets is not None else 0
        if label_names is None:
            label_names = tuple(f"label_{i + 1}" for i in range(n_labels))
        else:
            label_names = tuple(str(name) for name in label_names)
            if targets is not None and len(label_names) != n_labels:
                raise SchemaError(
                    f"{len(label_names)} label names for {n_labels} labels"
                )
        self.label_names = label_names

        if declared_type is not None and targets is not None:
            self._check_declared(declared_type)
        self.declared_type = declared_type

    def _check_declared(self, declared: ClassificationType) -> None:
        n_labels = self._targets.shape[1]
        if declared is ClassificationType.BINARY and n_labels != 2:
            raise SchemaError(f"binary dataset must have 2 labels, got {n_labels}")
        if declared is ClassificationType.MULTICLASS and n_labels < 3:
            raise SchemaError(f"multi-class dataset must have more than 2 labels, got {n_labels}")
        if declared in (ClassificationType.BINARY, ClassificationType.MULTICLASS):
            per_row = (self._targets == 1.0).sum(axis=1)
            if not (per_row == 1).all():
                bad = int(np.flatnonzero(per_row != 1)[0])
                raise SchemaError(
                    f"sample {bad} has {int(per_row[bad])} positive labels; "
                    f"{declared} data requires exactly one"
                )

    @property
    def features(self) -> np.ndarray:
        return self._features

    @property
    def targets(self) -> np.ndarray | None:
        return self._targets

    @property
    def n_features(self) -> int:
        return self._features.shape[1]

    @property
    def n_labels(self) -> int:
        if self._targets is None:
            raise StateError("dataset has no targets")
        return self._targets.shape[1]

    def __len__(self) -> int:
        return self._features.shape[0]

    def sample(self, index: int) -> Sample:
        labels = None
        if self._targets is not None:
            labels = decode_labels(self._targets[index])
        return Sample(features=self._features[index], labels=labels)

    def __iter__(self) -> Iterator[Sample]:
        return (self.sample(i) for i in range(len(self)))

    def label_sets(self) -> list[frozenset[int]]:
        """Decode every target row into its label set."""
        if self._targets is None:
            raise StateError("dataset has no targets")
        return [decode_labels(row) for row in self._targets]

    def subset(self, indices) -> "Dataset":
        """New dataset with the given rows, in the given order."""
        indices = np.asarray(indices, dtype=np.intp)
        targets = self._targets[indices] if self._targets is not None else None
        return Dataset(
            self._features[indices],
            targets,
            label_names=self.label_names or None,
            declared_type=self.declared_type,
        )

    def with_features(self, features) -> "Dataset":
        """New dataset with replaced features and shared labels."""
        return Dataset(
            features,
            self._targets,
            label_names=self.label_names or None,
            declared_type=self.declared_type,
        )

    def infer_type(self) -> ClassificationType:
        """Problem family implied by the targets alone."""
        if self._targets is None or len(self) == 0:
            raise StatisticsError("cannot infer problem type without labelled samples")
        per_row = (self._targets == 1.0).sum(axis=1)
        if (per_row == 1).all():
            if self.n_labels == 2:
                return ClassificationType.BINARY
            return ClassificationType.MULTICLASS
        return ClassificationType.MULTILABEL

    def effective_type(self) -> ClassificationType:
        return self.declared_type if self.declared_type is not None else self.infer_type()


def dataset_stats(dataset: Dataset) -> DatasetStats:
    """Compute label-space statistics of a labelled, non-empty dataset."""
    if len(dataset) == 0 or dataset.targets is None:
        raise StatisticsError("statistics require a non-empty labelled dataset")
    positives = (dataset.targets == 1.0).sum(axis=1)
    cardinality = float(positives.mean())
    return DatasetStats(
        n_labels=dataset.n_labels,
        n_features=dataset.n_features,
        n_samples=len(dataset),
        label_cardinality=cardinality,
        label_density=cardinality / dataset.n_labels,
    )
