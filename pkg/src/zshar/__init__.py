"""Zero-shot IMU activity recognition with skeleton-video explanations.

A recurrent IMU encoder is trained against video-derived class semantic
vectors; unseen activities are predicted by similarity matching, and each
prediction is explained by a generated skeleton movement sequence whose
alignment (Mahalanobis-cost DTW) and realism (discrete Frechet distance)
are measured against seen-class references.
"""

from .data import (
    ClassSemanticSet,
    Dataset,
    DatasetManifest,
    FoldSpec,
    ImuWindow,
    SkeletonSequence,
    SuperClassMap,
    SynthConfig,
    build_semantic_set,
    kfold_split,
    load_dataset,
    load_manifest,
    resample_skeleton,
    select_keypoints,
    synth_generate,
    train_val_split,
)
from .metrics import (
    AlignmentRecord,
    AlignmentReport,
    CostModel,
    RealismReport,
    alignment_metrics,
    avg_accuracy_per_class,
    dfd,
    dtw_distance,
    estimate_cost_model,
    mahalanobis_cost,
    matching_seen_class,
    realism_report,
)
from .model import (
    Explanation,
    ModelParams,
    Prediction,
    TrainConfig,
    class_probabilities,
    classification_loss,
    decode_skeleton,
    encode_imu,
    evaluate_fold,
    explain,
    load_checkpoint,
    matching_loss,
    predict_unseen,
    reconstruction_loss,
    save_checkpoint,
    similarity_scores,
    total_loss,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentRecord",
    "AlignmentReport",
    "ClassSemanticSet",
    "CostModel",
    "Dataset",
    "DatasetManifest",
    "Explanation",
    "FoldSpec",
    "ImuWindow",
    "ModelParams",
    "Prediction",
    "RealismReport",
    "SkeletonSequence",
    "SuperClassMap",
    "SynthConfig",
    "TrainConfig",
    "alignment_metrics",
    "avg_accuracy_per_class",
    "build_semantic_set",
    "class_probabilities",
    "classification_loss",
    "decode_skeleton",
    "dfd",
    "dtw_distance",
    "encode_imu",
    "estimate_cost_model",
    "evaluate_fold",
    "explain",
    "kfold_split",
    "load_checkpoint",
    "load_dataset",
    "load_manifest",
    "mahalanobis_cost",
    "matching_loss",
    "matching_seen_class",
    "predict_unseen",
    "realism_report",
    "reconstruction_loss",
    "resample_skeleton",
    "save_checkpoint",
    "select_keypoints",
    "similarity_scores",
    "synth_generate",
    "total_loss",
    "train",
    "train_val_split",
]
