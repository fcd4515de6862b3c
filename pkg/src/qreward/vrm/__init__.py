"""Verification-aware reward model: feature extraction, two-headed MLP,
oracle-distillation training, and training-data construction."""

from .features import (
    FEATURE_DIM,
    FEATURE_VERSION,
    FeatureConfig,
    extract_features,
    trigram_counts,
)
from .model import (
    DEFAULT_HIDDEN,
    MODEL_FORMAT,
    Mlp,
    ShapeMismatch,
    VrmModel,
    check_feature_compatibility,
    gelu,
    gelu_prime,
    sigmoid,
)
from .oracle_data import (
    CORRUPTION_RULES,
    CorruptorConfig,
    TrainingExample,
    annotate,
    build_oracle_dataset,
    corrupt_record,
    corruption_copies,
    example_features,
    prepare_batch,
)
from .training import (
    Batch,
    Gradients,
    LR_PRESETS,
    NonFiniteLoss,
    TrainConfig,
    TrainResult,
    grad,
    loss,
    train,
)

__all__ = [
    "Batch",
    "CORRUPTION_RULES",
    "CorruptorConfig",
    "DEFAULT_HIDDEN",
    "FEATURE_DIM",
    "FEATURE_VERSION",
    "FeatureConfig",
    "Gradients",
    "LR_PRESETS",
    "MODEL_FORMAT",
    "Mlp",
    "NonFiniteLoss",
    "ShapeMismatch",
    "TrainConfig",
    "TrainResult",
    "TrainingExample",
    "VrmModel",
    "annotate",
    "build_oracle_dataset",
    "check_feature_compatibility",
    "corrupt_record",
    "corruption_copies",
    "example_features",
    "extract_features",
    "gelu",
    "gelu_prime",
    "grad",
    "loss",
    "prepare_batch",
    "sigmoid",
    "train",
    "trigram_counts",
]
