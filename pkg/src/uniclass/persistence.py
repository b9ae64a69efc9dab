"""Versioned on-disk container for trained models.

The container is a zip of named arrays plus a JSON-encoded configuration.
Arrays round trip bit-exactly, so a loaded model predicts identically to
the one saved.  A format-version tag is checked before anything else is
trusted; files from other format versions are rejected outright rather
than partially loaded.
"""

from __future__ import annotations

import io as _stdio
import json
import zipfile
import zlib
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .datasets import ClassificationType
from .errors import ConfigurationError, IntegrityError, VersionError
from .io import RangeScaler
from .network import HiddenLayer, NetworkConfig, OnlineModel

FORMAT_VERSION = 1

_REQUIRED_KEYS = (
    "format_version",
    "config_json",
    "input_weights",
    "biases",
    "output_weights",
    "inv_gram",
    "samples_seen",
)


@dataclass(frozen=True)
class ModelBundle:
    """A trained model together with everything needed to apply it."""

    model: OnlineModel
    config: NetworkConfig
    label_names: tuple[str, ...] | None = None
    declared_type: ClassificationType | None = None
    fallback_mode: str | None = None
    scaler: RangeScaler | None = None


def save_model(
    model: OnlineModel,
    config: NetworkConfig,
    path,
    *,
    label_names=None,
    declared_type: ClassificationType | None = None,
    fallback_mode: str | None = None,
    scaler: RangeScaler | None = None,
) -> None:
    """Write a trained model and its context to ``path``."""
    arrays = {
        "format_version": np.array(FORMAT_VERSION),
        "config_json": np.array(json.dumps(asdict(config))),
        "input_weights": model.layer.input_weights,
        "biases": model.layer.biases,
        "output_weights": model.output_weights,
        "inv_gram": model.inv_gram,
        "samples_seen": np.array(model.samples_seen),
    }
    if label_names is not None:
        arrays["label_names"] = np.array([str(n) for n in label_names])
    if declared_type is not None:
        arrays["declared_type"] = np.array(declared_type.value)
    if fallback_mode is not None:
        arrays["fallback_mode"] = np.array(fallback_mode)
    if scaler is not None:
        arrays["scaler_min"] = scaler.data_min_
        arrays["scaler_max"] = scaler.data_max_
    # Write through a file object: np.savez would silently append ".npz"
    # to a bare path, breaking save-here/load-here symmetry.
    with open(path, "wb") as handle:
        np.savez(handle, **arrays)


def _load_arrays(path) -> dict[str, np.ndarray]:
    try:
        raw = Path(path).read_bytes()
    except FileNotFoundError:
        raise IntegrityError(f"model file not found: {path}") from None
    except OSError as exc:
        raise IntegrityError(f"cannot read model file {path}: {exc}") from None
    try:
        with np.load(_stdio.BytesIO(raw), allow_pickle=False) as archive:
            return {name: np.array(archive[name]) for name in archive.files}
    except (zipfile.BadZipFile, zlib.error, OSError, EOFError, ValueError, KeyError) as exc:
        raise IntegrityError(f"model file {path} is corrupt: {exc}") from None


def load_model(path) -> ModelBundle:
    """Read a model container, verifying version and structure first."""
    arrays = _load_arrays(path)

    if "format_version" not in arrays:
        raise IntegrityError(f"{path} is not a model container (no version tag)")
    version = int(arrays["format_version"])
    if version != FORMAT_VERSION:
        raise VersionError(
            f"model format version {version} is not supported (expected {FORMAT_VERSION})"
        )
    missing = [key for key in _REQUIRED_KEYS if key not in arrays]
    if missing:
        raise IntegrityError(f"model container is missing entries: {missing}")

    try:
        config_data = json.loads(str(arrays["config_json"]))
        config = NetworkConfig(**config_data)
    except (json.JSONDecodeError, TypeError, ConfigurationError) as exc:
        raise IntegrityError(f"model configuration is invalid: {exc}") from None

    weights = arrays["input_weights"]
    biases = arrays["biases"]
    output_weights = arrays["output_weights"]
    inv_gram = arrays["inv_gram"]
    samples_seen = int(arrays["samples_seen"])
    expected = {
        "input_weights": (config.n_hidden, config.input_dim),
        "biases": (config.n_hidden,),
        "output_weights": (config.n_hidden, config.output_dim),
        "inv_gram": (config.n_hidden, config.n_hidden),
    }
    for name, shape in expected.items():
        if arrays[name].shape != shape:
            raise IntegrityError(
                f"model entry {name} has shape {arrays[name].shape}, expected {shape}"
            )
    if samples_seen < 1:
        raise IntegrityError(f"model claims {samples_seen} training samples")

    layer = HiddenLayer(
        input_weights=weights, biases=biases, activation=config.activation
    )
    model = OnlineModel(
        layer=layer,
        output_weights=output_weights,
        inv_gram=inv_gram,
        samples_seen=samples_seen,
    )

    label_names = None
    if "label_names" in arrays:
        label_names = tuple(str(n) for n in arrays["label_names"])
    declared = None
    if "declared_type" in arrays:
        try:
            declared = ClassificationType(str(arrays["declared_type"]))
        except ValueError as exc:
            raise IntegrityError(f"bad declared type in model file: {exc}") from None
    fallback_mode = str(arrays["fallback_mode"]) if "fallback_mode" in arrays else None
    scaler = None
    if "scaler_min" in arrays or "scaler_max" in arrays:
        if not ("scaler_min" in arrays and "scaler_max" in arrays):
            raise IntegrityError("scaler state is incomplete")
        scaler = RangeScaler()
        scaler.data_min_ = arrays["scaler_min"]
        scaler.data_max_ = arrays["scaler_max"]
        scaler.n_features_in_ = int(arrays["scaler_min"].shape[0])
        if scaler.n_features_in_ != config.input_dim:
            raise IntegrityError(
                f"scaler covers {scaler.n_features_in_} features, model expects "
                f"{config.input_dim}"
            )

    return ModelBundle(
        model=model,
        config=config,
        label_names=label_names,
        declared_type=declared,
        fallback_mode=fallback_mode,
        scaler=scaler,
    )
