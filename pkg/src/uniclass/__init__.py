"""Streaming universal classifier.

One online least-squares model and one decision rule cover binary,
multi-class and multi-label classification.  The functional core lives in
``network``/``decision``; :class:`OnlineUniversalClassifier` wraps it in a
scikit-learn style estimator; ``harness`` and ``cli`` provide benchmarks.
"""

from .datasets import (
    ClassificationType,
    Dataset,
    DatasetStats,
    Sample,
    dataset_stats,
    decode_labels,
    encode_labels,
)
from .decision import (
    FallbackPolicy,
    Prediction,
    classify,
    count_labels,
    decide,
    decide_batch,
    heaviside,
    identify_type,
    in_type_table,
    positive_count,
)
from .errors import (
    ConfigurationError,
    DataError,
    EncodingError,
    IntegrityError,
    NumericalError,
    ParseError,
    SchemaError,
    ShapeError,
    SingularMatrixError,
    StateError,
    StatisticsError,
    UniclassError,
    VersionError,
)
from .estimator import OnlineUniversalClassifier
from .harness import EvaluationReport, RunConfig, run_kfold, run_stream_benchmark
from .io import (
    FormatSpec,
    RangeScaler,
    chunk_stream,
    fit_apply_normalizer,
    parse_dataset,
    write_arff,
    write_dense,
    write_sparse,
)
from .metrics import (
    MultiLabelResult,
    SingleLabelResult,
    evaluate_multilabel,
    example_based_metrics,
    hamming_loss,
    single_label_accuracy,
)
from .network import (
    ACTIVATIONS,
    HiddenLayer,
    NetworkConfig,
    OnlineModel,
    batch_train,
    hidden_output,
    init_block,
    init_layer,
    predict_raw,
    sequential_update,
)
from .persistence import FORMAT_VERSION, ModelBundle, load_model, save_model

__version__ = "0.1.0"

__all__ = [
    "ACTIVATIONS",
    "ClassificationType",
    "ConfigurationError",
    "DataError",
    "Dataset",
    "DatasetStats",
    "EncodingError",
    "EvaluationReport",
    "FORMAT_VERSION",
    "FallbackPolicy",
    "FormatSpec",
    "HiddenLayer",
    "IntegrityError",
    "ModelBundle",
    "MultiLabelResult",
    "NetworkConfig",
    "NumericalError",
    "OnlineModel",
    "OnlineUniversalClassifier",
    "ParseError",
    "Prediction",
    "RangeScaler",
    "RunConfig",
    "Sample",
    "SchemaError",
    "ShapeError",
    "SingleLabelResult",
    "SingularMatrixError",
    "StateError",
    "StatisticsError",
    "UniclassError",
    "VersionError",
    "batch_train",
    "chunk_stream",
    "classify",
    "count_labels",
    "dataset_stats",
    "decide",
    "decide_batch",
    "decode_labels",
    "encode_labels",
    "evaluate_multilabel",
    "example_based_metrics",
    "fit_apply_normalizer",
    "hamming_loss",
    "heaviside",
    "hidden_output",
    "identify_type",
    "in_type_table",
    "init_block",
    "init_layer",
    "load_model",
    "parse_dataset",
    "positive_count",
    "predict_raw",
    "run_kfold",
    "run_stream_benchmark",
    "save_model",
    "sequential_update",
    "single_label_accuracy",
    "write_arff",
    "write_dense",
    "write_sparse",
]
