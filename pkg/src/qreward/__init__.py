"""qreward: a verification-aware reward engine for quantum-mechanics
reasoning.

Deterministic physics/math checks produce trinary verification signals;
a trainable two-headed model scores semantic quality and per-dimension
reliability; adaptive fusion combines everything into a scalar reward served
over HTTP and a CLI for reinforcement-learning loops and reranking.
"""

__version__ = "0.1.0"

from .fusion import LambdaMap, RewardBreakdown, aggregate, best_of_n, fuse, reward
from .judge import (
    DimensionTriple,
    EnsembleJudge,
    JudgeUnavailable,
    OracleWeights,
    ReliabilityWeights,
    RemoteJudge,
    SemanticScores,
    StubJudge,
    classify_semantic,
    score_semantic,
)
from .records import SampleRecord, load_corpus, save_corpus
from .ses import (
    CheckConfig,
    CheckReport,
    EvalDimension,
    VerificationVector,
    extract_claims,
    run_check,
    verify,
)
from .vrm import (
    CorruptorConfig,
    TrainConfig,
    TrainingExample,
    VrmModel,
    build_oracle_dataset,
    extract_features,
    train,
)

__all__ = [
    "CheckConfig",
    "CheckReport",
    "CorruptorConfig",
    "DimensionTriple",
    "EnsembleJudge",
    "EvalDimension",
    "JudgeUnavailable",
    "LambdaMap",
    "OracleWeights",
    "ReliabilityWeights",
    "RemoteJudge",
    "RewardBreakdown",
    "SampleRecord",
    "SemanticScores",
    "StubJudge",
    "TrainConfig",
    "TrainingExample",
    "VerificationVector",
    "VrmModel",
    "aggregate",
    "best_of_n",
    "build_oracle_dataset",
    "classify_semantic",
    "extract_claims",
    "extract_features",
    "fuse",
    "load_corpus",
    "reward",
    "run_check",
    "save_corpus",
    "score_semantic",
    "train",
    "verify",
]
