"""Evaluation metrics for single-label and multi-label predictions.

Multi-label scores follow the example-based definitions: each sample is
scored on its own true/predicted label sets and the dataset score is the
mean over samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Sequence

import numpy as np

from .errors import ShapeError, StatisticsError


@dataclass(frozen=True)
class SingleLabelResult:
    """Scores for a single-label evaluation."""

    accuracy: float

    def as_dict(self) -> dict:
        return {"accuracy": self.accuracy}


@dataclass(frozen=True)
class MultiLabelResult:
    """Scores for a multi-label evaluation."""

    hamming_loss: float
    accuracy: float
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict:
        return {
            "hamming_loss": self.hamming_loss,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def single_label_accuracy(true_labels: Sequence[int], predicted_labels: Sequence[int]) -> float:
    """Fraction of samples whose single predicted label is correct."""
    true_labels = np.asarray(true_labels)
    predicted_labels = np.asarray(predicted_labels)
    if true_labels.shape != predicted_labels.shape or true_labels.ndim != 1:
        raise ShapeError(
            f"label arrays must be 1-d and equal length, got {true_labels.shape} "
            f"and {predicted_labels.shape}"
        )
    if true_labels.shape[0] == 0:
        raise StatisticsError("cannot score an empty prediction set")
    return float((true_labels == predicted_labels).mean())


def sets_to_indicator(label_sets: Sequence[Collection[int]], n_labels: int) -> np.ndarray:
    """0/1 membership matrix for a sequence of label sets."""
    indicator = np.zeros((len(label_sets), n_labels))
    for row, labels in enumerate(label_sets):
        for index in labels:
            indicator[row, int(index)] = 1.0
    return indicator


def hamming_loss(true_matrix: np.ndarray, predicted_matrix: np.ndarray) -> float:
    """Fraction of label slots that disagree, over all samples and labels.

    Accepts 0/1 or bipolar matrices; entries are compared by sign.
    """
    true_matrix = np.asarray(true_matrix, dtype=np.float64)
    predicted_matrix = np.asarray(predicted_matrix, dtype=np.float64)
    if true_matrix.shape != predicted_matrix.shape or true_matrix.ndim != 2:
        raise ShapeError(
            f"label matrices must be 2-d and equal shape, got {true_matrix.shape} "
            f"and {predicted_matrix.shape}"
        )
    if true_matrix.shape[0] == 0:
        raise StatisticsError("cannot score an empty prediction set")
    return float(((true_matrix > 0) != (predicted_matrix > 0)).mean())


def example_based_metrics(
    true_sets: Sequence[Collection[int]], predicted_sets: Sequence[Collection[int]]
) -> tuple[float, float, float, float]:
    """Mean example-based accuracy, precision, recall and F1.

    Per sample with true set Y and predicted set Z:

    * accuracy  = |Y & Z| / |Y | Z|
    * precision = |Y & Z| / |Z|
    * recall    = |Y & Z| / |Y|
    * f1        = 2 |Y & Z| / (|Y| + |Z|)

    A sample where both sets are empty scores 1.0 on all four; any other
    division by zero scores 0.0 for that term.
    """
    if len(true_sets) != len(predicted_sets):
        raise ShapeError(
            f"{len(true_sets)} true sets vs {len(predicted_sets)} predicted sets"
        )
    if len(true_sets) == 0:
        raise StatisticsError("cannot score an empty prediction set")

    accuracy = precision = recall = f1 = 0.0
    for true_raw, predicted_raw in zip(true_sets, predicted_sets):
        true = set(true_raw)
        predicted = set(predicted_raw)
        if not true and not predicted:
            accuracy += 1.0
            precision += 1.0
            recall += 1.0
            f1 += 1.0
            continue
        overlap = len(true & predicted)
        accuracy += overlap / len(true | predicted)
        precision += overlap / len(predicted) if predicted else 0.0
        recall += overlap / len(true) if true else 0.0
        f1 += 2.0 * overlap / (len(true) + len(predicted))
    count = len(true_sets)
    return (accuracy / count, precision / count, recall / count, f1 / count)


def evaluate_multilabel(
    true_sets: Sequence[Collection[int]],
    predicted_sets: Sequence[Collection[int]],
    n_labels: int,
) -> MultiLabelResult:
    """Full multi-label score set from true and predicted label sets."""
    accuracy, precision, recall, f1 = example_based_metrics(true_sets, predicted_sets)
    loss = hamming_loss(
        sets_to_indicator(true_sets, n_labels),
        sets_to_indicator(predicted_sets, n_labels),
    )
    return MultiLabelResult(
        hamming_loss=loss, accuracy=accuracy, precision=precision, recall=recall, f1=f1
    )
