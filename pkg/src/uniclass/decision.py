"""Turning continuous network outputs into label decisions.

The decision rule is shared by every problem family.  Each raw output is
thresholded at zero; the count of positive outputs, together with the size
of the label space, identifies which family the output pattern belongs to
and how many labels the sample should receive.  When the pattern is
ambiguous (no positive output, or several positives in a two-label space)
a fallback resolves it and the prediction is flagged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import ClassificationType
from .errors import ConfigurationError, NumericalError
from .network import OnlineModel, predict_raw

FALLBACK_MODES = ("argmax", "empty")


def heaviside(values: np.ndarray) -> np.ndarray:
    """Unit step applied elementwise, with the step at zero mapped to 0.

    Only strictly positive outputs count as membership.
    """
    values = np.asarray(values, dtype=np.float64)
    if np.isnan(values).any():
        raise NumericalError("cannot threshold NaN outputs")
    return np.heaviside(values, 0.0)


def positive_count(raw: np.ndarray) -> int:
    """Number of strictly positive entries of a raw output vector."""
    return int(heaviside(raw).sum())


def identify_type(n_positive: int, n_labels: int) -> ClassificationType:
    """Problem family suggested by one output pattern.

    Exactly one positive output means a single-label problem: binary when
    the label space has two labels, multi-class otherwise.  Several
    positives in a space of three or more labels mean multi-label.  The
    remaining patterns match no family directly and are completed by the
    nearest one: no positives in a two-label space (or two positives
    there) still reads as binary, while no positives in a larger space
    reads as an empty multi-label set.
    """
    if n_labels < 2:
        raise ConfigurationError(f"label space must have at least 2 labels, got {n_labels}")
    if n_positive < 0:
        raise ConfigurationError(f"positive count must be >= 0, got {n_positive}")
    if n_labels == 2:
        return ClassificationType.BINARY
    if n_positive == 1:
        return ClassificationType.MULTICLASS
    return ClassificationType.MULTILABEL


def in_type_table(n_positive: int, n_labels: int) -> bool:
    """Whether the pattern maps to a family without any completion rule."""
    if n_positive == 1:
        return n_labels >= 2
    return n_positive > 1 and n_labels > 2


def count_labels(kind: ClassificationType, raw: np.ndarray) -> int:
    """How many labels a sample of the given family should receive."""
    if kind in (ClassificationType.BINARY, ClassificationType.MULTICLASS):
        return 1
    return positive_count(raw)


@dataclass(frozen=True)
class FallbackPolicy:
    """How to resolve ambiguous output patterns.

    Attributes
    ----------
    mode : str
        ``"argmax"`` assigns the label with the largest raw output when a
        multi-label pattern has no positive entry; ``"empty"`` leaves the
        label set empty.  Single-label decisions always use argmax.
    declared_type : ClassificationType, optional
        Family declared by the data source.  When set it overrides the
        per-sample identification for the decision; the identification is
        still reported.
    """

    mode: str = "argmax"
    declared_type: ClassificationType | None = None

    def __post_init__(self):
        if self.mode not in FALLBACK_MODES:
            raise ConfigurationError(
                f"unknown fallback mode {self.mode!r}; expected one of {FALLBACK_MODES}"
            )


@dataclass(frozen=True)
class Prediction:
    """Decision for one sample.

    ``classification_type`` is the family the decision actually used
    (declared when available, identified otherwise); ``identified_type``
    is what the output pattern alone suggests.  ``fallback_used`` marks
    predictions where the pattern did not directly yield a valid label
    set for the family.
    """

    raw: np.ndarray
    belongingness: np.ndarray
    n_positive: int
    labels: frozenset[int]
    classification_type: ClassificationType
    identified_type: ClassificationType
    in_table: bool
    fallback_used: bool


def decide(raw: np.ndarray, policy: FallbackPolicy = FallbackPolicy()) -> Prediction:
    """Apply the decision rule to one raw output vector.

    The decision depends only on the signs and the ordering of the raw
    outputs, so it is invariant to positive rescaling.
    """
    raw = np.array(raw, dtype=np.float64)
    if raw.ndim != 1:
        raise ConfigurationError(f"raw output must be 1-d, got shape {raw.shape}")
    n_labels = raw.shape[0]
    if n_labels < 2:
        raise ConfigurationError(f"raw output must have at least 2 entries, got {n_labels}")

    belong = heaviside(raw)
    n_positive = int(belong.sum())
    identified = identify_type(n_positive, n_labels)
    effective = policy.declared_type if policy.declared_type is not None else identified

    if effective in (ClassificationType.BINARY, ClassificationType.MULTICLASS):
        if n_positive == 1:
            labels = frozenset({int(np.argmax(belong))})
            fallback = False
        else:
            # No positive output, or several: take the largest raw output.
            # np.argmax breaks ties toward the lowest index.
            labels = frozenset({int(np.argmax(raw))})
            fallback = True
    else:
        if n_positive >= 1:
            labels = frozenset(int(i) for i in np.flatnonzero(belong))
            fallback = False
        elif policy.mode == "argmax":
            labels = frozenset({int(np.argmax(raw))})
            fallback = True
        else:
            labels = frozenset()
            fallback = True

    raw.flags.writeable = False
    belong.flags.writeable = False
    return Prediction(
        raw=raw,
        belongingness=belong,
        n_positive=n_positive,
        labels=labels,
        classification_type=effective,
        identified_type=identified,
        in_table=in_type_table(n_positive, n_labels),
        fallback_used=fallback,
    )


def decide_batch(raw: np.ndarray, policy: FallbackPolicy = FallbackPolicy()) -> list[Prediction]:
    """Apply the decision rule to every row of a raw output matrix."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 2:
        raise ConfigurationError(f"raw outputs must be 2-d, got shape {raw.shape}")
    return [decide(row, policy) for row in raw]


def classify(
    model: OnlineModel, features: np.ndarray, policy: FallbackPolicy = FallbackPolicy()
) -> Prediction:
    """End-to-end decision for a single feature vector."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 1:
        raise ConfigurationError(f"features must be 1-d, got shape {features.shape}")
    raw = predict_raw(model, features.reshape(1, -1))
    return decide(raw[0], policy)
