"""Scikit-learn style front end over the functional training core.

The estimator fixes the label-space size and problem family at fit time
and then behaves like any other classifier: ``fit``/``partial_fit``,
``decision_function``, ``predict``, ``get_params``.  Classes are label
indices ``0..L-1``; mapping to and from human-readable names is the job
of the dataset layer, not the estimator.
"""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .datasets import ClassificationType
from .decision import FallbackPolicy, Prediction, decide_batch
from .errors import ConfigurationError
from .metrics import example_based_metrics, single_label_accuracy
from .network import (
    NetworkConfig,
    init_block,
    init_layer,
    predict_raw,
    sequential_update,
)

_PROBLEM_TYPES = {t.value: t for t in ClassificationType}


def _to_bipolar_matrix(y, n_labels: int | None = None) -> np.ndarray:
    """Coerce targets to a bipolar (N, L) matrix.

    Accepts a 1-d vector of class indices, a 0/1 indicator matrix, or an
    already bipolar matrix.
    """
    y = np.asarray(y)
    if y.ndim == 1:
        if not np.issubdtype(y.dtype, np.integer):
            as_int = y.astype(np.int64, casting="unsafe")
            if not np.array_equal(as_int, y):
                raise ValueError("1-d targets must be integer class indices")
            y = as_int
        if n_labels is None:
            n_labels = max(int(y.max()) + 1, 2) if y.size else 2
        if y.min() < 0 or y.max() >= n_labels:
            raise ValueError(
                f"class indices must lie in [0, {n_labels}), got "
                f"[{y.min()}, {y.max()}]"
            )
        matrix = np.full((y.shape[0], n_labels), -1.0)
        matrix[np.arange(y.shape[0]), y] = 1.0
        return matrix
    if y.ndim != 2:
        raise ValueError(f"targets must be 1-d or 2-d, got shape {y.shape}")
    y = y.astype(np.float64)
    values = set(np.unique(y))
    if values <= {0.0, 1.0}:
        matrix = np.where(y > 0, 1.0, -1.0)
    elif values <= {-1.0, 1.0}:
        matrix = y.copy()
    else:
        raise ValueError(
            "2-d targets must be a 0/1 indicator or a -1/+1 matrix, got values "
            f"{sorted(values)[:6]}"
        )
    if n_labels is not None and matrix.shape[1] != n_labels:
        raise ValueError(f"targets have {matrix.shape[1]} columns, expected {n_labels}")
    if matrix.shape[1] < 2:
        raise ValueError(f"label space must have at least 2 labels, got {matrix.shape[1]}")
    return matrix


class OnlineUniversalClassifier(ClassifierMixin, BaseEstimator):
    """One estimator for binary, multi-class and multi-label problems.

    A single hidden layer with random fixed weights feeds a linear map
    trained by (recursive) least squares.  ``fit`` trains in one batch;
    ``partial_fit`` streams chunks, and any chunking reproduces the batch
    solution up to floating-point noise.

    Parameters
    ----------
    n_hidden : int, default=40
        Hidden units.  More units fit more, but invite overfitting;
        a reasonable starting point is min(N0, 10 * sqrt(n_features *
        n_labels)) for an initial block of N0 samples.
    activation : str, default="sigmoid"
        Hidden activation: "sigmoid", "tanh", "sine" or "hardlimit".
    ridge : float, default=1e-6
        Regularisation of the least-squares solve.  Zero gives the pure
        minimum-norm solution but needs a well-conditioned initial block.
    problem_type : str, optional
        "binary", "multiclass" or "multilabel".  Inferred from the
        targets when omitted.
    fallback : str, default="argmax"
        How multi-label decisions resolve all-negative outputs:
        "argmax" picks the strongest label, "empty" predicts no labels.
    random_state : int, optional
        Seed for the hidden layer draw.  ``None`` draws a fresh seed.

    Attributes
    ----------
    model_ : OnlineModel
        Trained network state.
    config_ : NetworkConfig
        Resolved hyperparameters, including the seed actually used.
    classes_ : ndarray
        Label indices ``0..L-1``.
    problem_type_ : ClassificationType
        Family fixed at fit time and used by ``predict``.
    """

    def __init__(
        self,
        n_hidden: int = 40,
        activation: str = "sigmoid",
        ridge: float = 1e-6,
        problem_type: str | None = None,
        fallback: str = "argmax",
        random_state: int | None = 0,
    ):
        self.n_hidden = n_hidden
        self.activation = activation
        self.ridge = ridge
        self.problem_type = problem_type
        self.fallback = fallback
        self.random_state = random_state

    # -- internals ---------------------------------------------------

    def _resolved_seed(self) -> int:
        if self.random_state is None:
            return int(np.random.SeedSequence().entropy % (2**32))
        if not isinstance(self.random_state, numbers.Integral):
            raise ValueError(f"random_state must be an int or None, got {self.random_state!r}")
        return int(self.random_state)

    def _declared_type(self, targets: np.ndarray) -> ClassificationType:
        if self.problem_type is not None:
            try:
                return _PROBLEM_TYPES[self.problem_type]
            except KeyError:
                raise ValueError(
                    f"problem_type must be one of {sorted(_PROBLEM_TYPES)}, "
                    f"got {self.problem_type!r}"
                ) from None
        per_row = (targets == 1.0).sum(axis=1)
        if (per_row == 1).all():
            if targets.shape[1] == 2:
                return ClassificationType.BINARY
            return ClassificationType.MULTICLASS
        return ClassificationType.MULTILABEL

    def _policy(self) -> FallbackPolicy:
        return FallbackPolicy(mode=self.fallback, declared_type=self.problem_type_)

    def _check_features(self, X, reset: bool) -> np.ndarray:
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        if reset:
            self.n_features_in_ = X.shape[1]
        elif X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, estimator was fitted with "
                f"{self.n_features_in_}"
            )
        return X

    def _initialize(self, X: np.ndarray, targets: np.ndarray) -> None:
        self.config_ = NetworkConfig(
            n_hidden=self.n_hidden,
            input_dim=X.shape[1],
            output_dim=targets.shape[1],
            activation=self.activation,
            ridge=self.ridge,
            seed=self._resolved_seed(),
        )
        layer = init_layer(self.config_)
        self.model_ = init_block(layer, X, targets, self.ridge)
        self.classes_ = np.arange(targets.shape[1])
        self.n_labels_ = targets.shape[1]
        self.problem_type_ = self._declared_type(targets)

    # -- scikit-learn surface ------------------------------------------

    def fit(self, X, y):
        """Train on the full batch in one least-squares solve."""
        X = self._check_features(X, reset=True)
        targets = _to_bipolar_matrix(y)
        if targets.shape[0] != X.shape[0]:
            raise ValueError(f"{X.shape[0]} samples but {targets.shape[0]} targets")
        self._initialize(X, targets)
        return self

    def partial_fit(self, X, y, classes=None):
        """Stream one chunk; the first call forms the initial block.

        ``classes`` (the full list of label indices) is honoured on the
        first call, matching the scikit-learn convention; it lets a 1-d
        target vector miss some classes in the first chunk.
        """
        first_call = not hasattr(self, "model_")
        X = self._check_features(X, reset=first_call)
        n_labels = None
        if classes is not None:
            classes = np.asarray(classes)
            if not np.array_equal(classes, np.arange(len(classes))):
                raise ValueError("classes must be the consecutive indices 0..L-1")
            n_labels = len(classes)
        if not first_call:
            n_labels = self.n_labels_
        targets = _to_bipolar_matrix(y, n_labels)
        if targets.shape[0] != X.shape[0]:
            raise ValueError(f"{X.shape[0]} samples but {targets.shape[0]} targets")
        if first_call:
            self._initialize(X, targets)
        else:
            self.model_ = sequential_update(self.model_, X, targets)
        return self

    def decision_function(self, X) -> np.ndarray:
        """Continuous raw outputs, one row per sample, one column per label."""
        check_is_fitted(self, "model_")
        X = self._check_features(X, reset=False)
        return predict_raw(self.model_, X)

    def predict_detail(self, X) -> list[Prediction]:
        """Full decision record (labels, type, fallback flag) per sample."""
        return decide_batch(self.decision_function(X), self._policy())

    def predict(self, X) -> np.ndarray:
        """Predicted class index per sample, or a 0/1 matrix when multi-label."""
        details = self.predict_detail(X)
        if self.problem_type_ is ClassificationType.MULTILABEL:
            indicator = np.zeros((len(details), self.n_labels_), dtype=np.int64)
            for row, prediction in enumerate(details):
                for index in prediction.labels:
                    indicator[row, index] = 1
            return indicator
        return np.array([next(iter(p.labels)) for p in details], dtype=np.int64)

    def score(self, X, y, sample_weight=None) -> float:
        """Accuracy for single-label problems; mean set-overlap accuracy
        (per-sample Jaccard) for multi-label ones."""
        check_is_fitted(self, "model_")
        targets = _to_bipolar_matrix(y, getattr(self, "n_labels_", None))
        if self.problem_type_ is ClassificationType.MULTILABEL:
            true_sets = [set(np.flatnonzero(row == 1.0)) for row in targets]
            predicted = [set(p.labels) for p in self.predict_detail(X)]
            accuracy, _, _, _ = example_based_metrics(true_sets, predicted)
            return accuracy
        true_indices = np.argmax(targets, axis=1)
        return single_label_accuracy(true_indices, self.predict(X))
