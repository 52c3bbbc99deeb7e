"""Training-free video classification by aligning per-frame embeddings to
ordered sub-action text embeddings with max-similarity DTW."""

from .affinity import AffinityMatrix, CalibrationParams, build_affinity, load_calibration
from .alignment import AlignmentResult, DtwConfig, align, backtrack, dtw_table
from .classify import (
    VideoPrediction,
    classify_actalign,
    classify_bag_of_words,
    classify_mean_pool,
    perturb_script,
)
from .config import RunConfig
from .corpus import (
    ClassNameEmbedding,
    DatasetManifest,
    EmbeddingSequence,
    SubActionScript,
    VideoEntry,
    load_embeddings,
    load_manifest,
    load_name_embeddings,
    load_scripts,
    read_tensor,
    write_embeddings,
    write_tensor,
)
from .errors import ActAlignError, ConfigError, ManifestError, ScriptError, TensorError
from .kernels import active_backend
from .pipeline import ablation_grid, corpus_seq_provider, run_classification
from .reporting import (
    EvaluationReport,
    per_domain_breakdown,
    report_to_json,
    topk_accuracy,
)
from .smoothing import SmoothingConfig, smooth

__version__ = "0.1.0"

__all__ = [
    "ActAlignError",
    "AffinityMatrix",
    "AlignmentResult",
    "CalibrationParams",
    "ClassNameEmbedding",
    "ConfigError",
    "DatasetManifest",
    "DtwConfig",
    "EmbeddingSequence",
    "EvaluationReport",
    "ManifestError",
    "RunConfig",
    "ScriptError",
    "SmoothingConfig",
    "SubActionScript",
    "TensorError",
    "VideoEntry",
    "VideoPrediction",
    "ablation_grid",
    "active_backend",
    "align",
    "backtrack",
    "build_affinity",
    "classify_actalign",
    "classify_bag_of_words",
    "classify_mean_pool",
    "corpus_seq_provider",
    "dtw_table",
    "load_calibration",
    "load_embeddings",
    "load_manifest",
    "load_name_embeddings",
    "load_scripts",
    "per_domain_breakdown",
    "perturb_script",
    "read_tensor",
    "report_to_json",
    "run_classification",
    "smooth",
    "topk_accuracy",
    "write_embeddings",
    "write_tensor",
]
