"""Arc-voltage weld monitoring: preprocessing, map-based labeling, ranking, classification.

Heavy inner loops run on a compiled extension when it is available; set
WELDMON_BACKEND=numpy (or =compiled) before import to force a backend. The
active one is exposed as weldmon.kernel_backend.
"""

from ._kernels import BACKEND as kernel_backend
from .errors import WeldmonError, InvalidArgumentError, EmptyInputError
from .signal_processing import (
    RawSeries,
    Segment,
    FeatureVector,
    Provenance,
    PreprocessConfig,
    moving_average_filter,
    segment_series,
    block_downsample,
    preprocess_series,
    read_raw_series,
    write_raw_series,
)
from .dataset import (
    LabeledRecord,
    LabeledDataset,
    from_feature_vectors,
    read_dataset_csv,
    write_dataset_csv,
)
from .synthetic import (
    WelderProfile,
    GroundTruth,
    generate_trial,
    generate_corpus,
    iter_corpus,
    generate_feature_corpus,
    default_profiles,
)
from .som import (
    SomConfig,
    SomModel,
    ClusterLabeling,
    train_som,
    best_matching_unit,
    cluster_counts,
    label_clusters,
    label_dataset,
    save_som,
    load_som,
)
from .mlp import MlpConfig, MlpModel, init_mlp, train_mlp, gradient_check, save_mlp, load_mlp
from .rbf import (
    RbfConfig,
    RbfModel,
    KMeansResult,
    kmeans,
    compute_widths,
    rbf_features,
    train_rbf,
    save_rbf,
    load_rbf,
)
from .evaluation import (
    ConfusionMatrix,
    EvalReport,
    split_dataset,
    confusion,
    metrics,
    build_report,
    compare_models,
    format_comparison,
)
from .ranking import WelderScore, score_welders
from .streaming import StreamingDetector, ErrorEvent, batch_decisions

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "WeldmonError",
    "InvalidArgumentError",
    "EmptyInputError",
    "RawSeries",
    "Segment",
    "FeatureVector",
    "Provenance",
    "PreprocessConfig",
    "moving_average_filter",
    "segment_series",
    "block_downsample",
    "preprocess_series",
    "read_raw_series",
    "write_raw_series",
    "LabeledRecord",
    "LabeledDataset",
    "from_feature_vectors",
    "read_dataset_csv",
    "write_dataset_csv",
    "WelderProfile",
    "GroundTruth",
    "generate_trial",
    "generate_corpus",
    "iter_corpus",
    "generate_feature_corpus",
    "default_profiles",
    "SomConfig",
    "SomModel",
    "ClusterLabeling",
    "train_som",
    "best_matching_unit",
    "cluster_counts",
    "label_clusters",
    "label_dataset",
    "save_som",
    "load_som",
    "MlpConfig",
    "MlpModel",
    "init_mlp",
    "train_mlp",
    "gradient_check",
    "save_mlp",
    "load_mlp",
    "RbfConfig",
    "RbfModel",
    "KMeansResult",
    "kmeans",
    "compute_widths",
    "rbf_features",
    "train_rbf",
    "save_rbf",
    "load_rbf",
    "ConfusionMatrix",
    "EvalReport",
    "split_dataset",
    "confusion",
    "metrics",
    "build_report",
    "compare_models",
    "format_comparison",
    "WelderScore",
    "score_welders",
    "StreamingDetector",
    "ErrorEvent",
    "batch_decisions",
    "__version__",
]
