"""Random-projection network and its least-squares training rules.

The model is a single hidden layer whose input weights and biases are drawn
once at random and never trained.  Only the linear output weights are
learned, either in one batch solve or incrementally from chunks of data via
a recursive least-squares update.  Both routes minimise the same ridge
objective, so streaming over any chunking of the data reproduces the batch
solution up to floating-point noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit

from .errors import (
    ConfigurationError,
    NumericalError,
    ShapeError,
    SingularMatrixError,
    StateError,
)

# Condition estimate above which the normal equations are rejected.
CONDITION_LIMIT = 1e12

ACTIVATIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sigmoid": expit,
    "tanh": np.tanh,
    "sine": np.sin,
    "hardlimit": lambda z: (z > 0).astype(np.float64),
}


@dataclass(frozen=True)
class NetworkConfig:
    """Hyperparameters of the network and its training rule.

    Attributes
    ----------
    n_hidden : int
        Number of hidden units.
    input_dim : int
        Number of input features.
    output_dim : int
        Number of outputs (size of the label space), at least 2.
    activation : str
        Hidden activation name, one of ``ACTIVATIONS``.
    ridge : float
        Non-negative regularisation added to the normal equations.
    seed : int
        Seed for drawing input weights and biases.
    """

    n_hidden: int
    input_dim: int
    output_dim: int
    activation: str = "sigmoid"
    ridge: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.n_hidden < 1:
            raise ConfigurationError(f"n_hidden must be >= 1, got {self.n_hidden}")
        if self.input_dim < 1:
            raise ConfigurationError(f"input_dim must be >= 1, got {self.input_dim}")
        if self.output_dim < 2:
            raise ConfigurationError(f"output_dim must be >= 2, got {self.output_dim}")
        if self.activation not in ACTIVATIONS:
            known = ", ".join(sorted(ACTIVATIONS))
            raise ConfigurationError(
                f"unknown activation {self.activation!r}; expected one of {known}"
            )
        if not (self.ridge >= 0.0):
            raise ConfigurationError(f"ridge must be >= 0, got {self.ridge}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be >= 0, got {self.seed}")


def _frozen_array(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class HiddenLayer:
    """Fixed random projection: weights, biases and activation name."""

    input_weights: np.ndarray  # (n_hidden, input_dim)
    biases: np.ndarray  # (n_hidden,)
    activation: str

    @property
    def n_hidden(self) -> int:
        return self.input_weights.shape[0]

    @property
    def input_dim(self) -> int:
        return self.input_weights.shape[1]


@dataclass(frozen=True)
class OnlineModel:
    """Trained state: the layer plus output weights and solver memory.

    ``inv_gram`` is the inverse of the (ridge-regularised) Gram matrix of
    all hidden activations seen so far; it is what lets later chunks update
    the output weights without revisiting old data.
    """

    layer: HiddenLayer
    output_weights: np.ndarray  # (n_hidden, output_dim)
    inv_gram: np.ndarray  # (n_hidden, n_hidden), symmetric
    samples_seen: int


def init_layer(config: NetworkConfig) -> HiddenLayer:
    """Draw input weights and biases uniformly from [-1, 1].

    The draw is fully determined by ``config.seed``.
    """
    rng = np.random.default_rng(config.seed)
    weights = rng.uniform(-1.0, 1.0, size=(config.n_hidden, config.input_dim))
    biases = rng.uniform(-1.0, 1.0, size=config.n_hidden)
    return HiddenLayer(
        input_weights=_frozen_array(weights),
        biases=_frozen_array(biases),
        activation=config.activation,
    )


def hidden_output(layer: HiddenLayer, features: np.ndarray) -> np.ndarray:
    """Activation matrix of the hidden layer for a batch of samples.

    Row ``i``, column ``j`` holds ``g(w_j . x_i + b_j)``.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise ShapeError(f"features must be 2-d, got shape {features.shape}")
    if features.shape[1] != layer.input_dim:
        raise ShapeError(
            f"features have {features.shape[1]} columns, layer expects {layer.input_dim}"
        )
    if features.size and not np.isfinite(features).all():
        raise NumericalError("features contain non-finite values")
    activate = ACTIVATIONS[layer.activation]
    return activate(features @ layer.input_weights.T + layer.biases)


def _as_target_matrix(targets: np.ndarray, n_rows: int) -> np.ndarray:
    targets = np.asarray(targets, dtype=np.float64)
    if targets.ndim == 1:
        targets = targets.reshape(-1, 1)
    if targets.ndim != 2 or targets.shape[0] != n_rows:
        raise ShapeError(
            f"targets shape {targets.shape} does not match {n_rows} samples"
        )
    return targets


def _solve_normal_equations(
    activations: np.ndarray, targets: np.ndarray, ridge: float
) -> tuple[np.ndarray, np.ndarray]:
    """Solve the ridge normal equations by explicit inversion.

    Returns ``(inv_gram, output_weights)``.  The explicit inverse is kept
    because streaming updates need it as their starting state; batch and
    streaming initialisation share this exact code path so their results
    are identical, not merely close.
    """
    gram = activations.T @ activations + ridge * np.eye(activations.shape[1])
    condition = np.linalg.cond(gram)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularMatrixError(
            f"normal equations are ill-conditioned (estimate {condition:.3e} > "
            f"{CONDITION_LIMIT:.0e}); use a positive ridge or more samples"
        )
    inv_gram = np.linalg.inv(gram)
    inv_gram = (inv_gram + inv_gram.T) / 2.0
    output_weights = inv_gram @ (activations.T @ targets)
    return inv_gram, output_weights


def batch_train(activations: np.ndarray, targets: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """Least-squares output weights for a full batch of activations.

    With ``ridge=0`` this is the minimum-norm solution of the normal
    equations; a positive ridge trades bias for conditioning.
    """
    activations = np.asarray(activations, dtype=np.float64)
    if activations.ndim != 2 or activations.shape[0] < 1:
        raise ShapeError(f"activations must be 2-d and non-empty, got shape {activations.shape}")
    if ridge < 0:
        raise ConfigurationError(f"ridge must be >= 0, got {ridge}")
    targets = _as_target_matrix(targets, activations.shape[0])
    _, output_weights = _solve_normal_equations(activations, targets, ridge)
    return output_weights


def init_block(
    layer: HiddenLayer, features: np.ndarray, targets: np.ndarray, ridge: float = 1e-6
) -> OnlineModel:
    """Train on the initial block and set up state for streaming updates.

    Uses the same solve as :func:`batch_train`, so a model initialised on
    some data has exactly the batch weights for that data.  With
    ``ridge=0`` the block must make the Gram matrix well conditioned,
    which in practice requires at least as many samples as hidden units.
    """
    if ridge < 0:
        raise ConfigurationError(f"ridge must be >= 0, got {ridge}")
    activations = hidden_output(layer, features)
    targets = _as_target_matrix(targets, activations.shape[0])
    inv_gram, output_weights = _solve_normal_equations(activations, targets, ridge)
    return OnlineModel(
        layer=layer,
        output_weights=_frozen_array(output_weights),
        inv_gram=_frozen_array(inv_gram),
        samples_seen=activations.shape[0],
    )


def sequential_update(
    model: OnlineModel, features: np.ndarray, targets: np.ndarray
) -> OnlineModel:
    """Fold one chunk of samples into the model without revisiting old data.

    Implements the recursive least-squares update in its block form: for a
    chunk of ``c`` samples only a ``c x c`` system is solved.  With ``c=1``
    this degenerates to the classic rank-one update.  The solver memory is
    re-symmetrised after every update to stop round-off drift.
    """
    activations = hidden_output(model.layer, features)
    if activations.shape[0] < 1:
        raise ShapeError("chunk must contain at least one sample")
    targets = _as_target_matrix(targets, activations.shape[0])
    if targets.shape[1] != model.output_weights.shape[1]:
        raise ShapeError(
            f"targets have {targets.shape[1]} columns, model expects "
            f"{model.output_weights.shape[1]}"
        )

    chunk = activations.shape[0]
    projected = activations @ model.inv_gram  # (c, n_hidden)
    small = np.eye(chunk) + projected @ activations.T  # (c, c)
    try:
        correction = np.linalg.solve(small, projected)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"streaming update failed: {exc}") from exc
    inv_gram = model.inv_gram - projected.T @ correction
    inv_gram = (inv_gram + inv_gram.T) / 2.0

    residual = targets - activations @ model.output_weights
    output_weights = model.output_weights + inv_gram @ (activations.T @ residual)
    if not (np.isfinite(inv_gram).all() and np.isfinite(output_weights).all()):
        raise NumericalError("streaming update produced non-finite values")
    return OnlineModel(
        layer=model.layer,
        output_weights=_frozen_array(output_weights),
        inv_gram=_frozen_array(inv_gram),
        samples_seen=model.samples_seen + chunk,
    )


def predict_raw(model: OnlineModel, features: np.ndarray) -> np.ndarray:
    """Continuous network outputs, one row per sample."""
    if model.samples_seen < 1:
        raise StateError("model has not been trained on any samples")
    activations = hidden_output(model.layer, features)
    return activations @ model.output_weights
