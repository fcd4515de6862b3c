"""Oracle-annotated training data: positives verbatim plus rule-corrupted
hard negatives, each labeled with the verifier vector and a judge backend's
soft scores s* and importance weights w*.

The oracle weighting convention places strictly higher w* on dimensions the
verifier actually executed (v=+1 averages above v=0), which is what the
weight head is later expected to reproduce.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace as dc_replace

import numpy as np

from ..expr import BinOp, ComplexMatrix, Num, hermitian_eig
from ..judge import JudgeBackend, OracleWeights, SemanticScores
from ..records import SampleRecord
from ..ses import (
    CheckConfig,
    CommutatorClaim,
    EigenvalueClaim,
    EnergyClaim,
    FinalExpressionClaim,
    MatrixClaim,
    NumericClaim,
    ProbabilityClaim,
    VerificationVector,
    extract_claims,
    replace_claims,
    verify,
)
from ..util import stable_seed
from .features import FeatureConfig, extract_features
from .training import Batch


@dataclass
class TrainingExample:
    question: str
    answer: str
    v: VerificationVector
    s_star: SemanticScores
    w_star: OracleWeights
    task_type: str | None = None
    example_id: str | None = None
    reference_answer: str | None = None
    features: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        obj = {
            "question": self.question,
            "answer": self.answer,
            "v": self.v.to_json_dict(),
            "s_star": self.s_star.to_json_dict(),
            "w_star": self.w_star.to_json_dict(),
        }
        if self.task_type is not None:
            obj["task_type"] = self.task_type
        if self.example_id is not None:
            obj["id"] = self.example_id
        if self.reference_answer is not None:
            obj["reference_answer"] = self.reference_answer
        if self.features is not None:
            obj["features"] = [float(x) for x in self.features]
        return obj

    @staticmethod
    def from_json_dict(obj: dict) -> "TrainingExample":
        return TrainingExample(
            question=obj["question"],
            answer=obj["answer"],
            v=VerificationVector.from_json_dict(obj["v"]),
            s_star=SemanticScores.from_json_dict(obj["s_star"]),
            w_star=OracleWeights.from_json_dict(obj["w_star"]),
            task_type=obj.get("task_type"),
            example_id=obj.get("id"),
            reference_answer=obj.get("reference_answer"),
            features=(
                np.asarray(obj["features"], dtype=np.float64)
                if "features" in obj
                else None
            ),
        )


# ---------------------------------------------------------------------------
# corruption rules: each takes a claim and returns a corrupted copy or None
# when it does not apply


def _corrupt_energy_zero(claim):
    if isinstance(claim, EnergyClaim) and claim.system == "bound_state":
        return dc_replace(claim, energy=Num(0.0), quantum_number=0)
    if isinstance(claim, NumericClaim) and claim.where and "n" in claim.where:
        where = dict(claim.where)
        where["n"] = 0j
        return dc_replace(claim, value=Num(0.0), where=where)
    return None


def _corrupt_unitary_scale(claim):
    if isinstance(claim, MatrixClaim) and claim.kind == "unitary_evolution":
        return dc_replace(claim, matrix=claim.matrix.scale(1.1))
    return None


def _corrupt_density_shift(claim):
    if isinstance(claim, MatrixClaim) and claim.kind == "density_matrix":
        values, q = hermitian_eig(claim.matrix)
        values = values.copy()
        values[0] -= 0.05
        shifted = q @ np.diag(values) @ q.conj().T
        return dc_replace(claim, matrix=ComplexMatrix(shifted))
    return None


def _corrupt_probabilities(claim):
    if isinstance(claim, ProbabilityClaim):
        return dc_replace(claim, values=tuple(v * 1.2 for v in claim.values))
    return None


def _corrupt_commutator(claim):
    if isinstance(claim, CommutatorClaim):
        return dc_replace(claim, result="exp(-I*w*t)")
    return None


def _corrupt_numeric(claim):
    if isinstance(claim, NumericClaim) and claim.reference is not None:
        return dc_replace(claim, value=BinOp("+", claim.value, Num(0.01)))
    return None


def _corrupt_expression(claim):
    if isinstance(claim, FinalExpressionClaim):
        return dc_replace(claim, expr=BinOp("*", claim.expr, Num(1.01)))
    return None


def _corrupt_spectrum(claim):
    if isinstance(claim, EigenvalueClaim) and claim.values:
        values = list(claim.values)
        values[0] -= 0.5
        return dc_replace(claim, values=tuple(values))
    return None


def _corrupt_state_norm(claim):
    if isinstance(claim, MatrixClaim) and claim.kind == "state_vector":
        return dc_replace(claim, matrix=claim.matrix.scale(1.2))
    return None


CORRUPTION_RULES = {
    "energy_zero": _corrupt_energy_zero,
    "unitary_scale": _corrupt_unitary_scale,
    "density_shift": _corrupt_density_shift,
    "prob_break": _corrupt_probabilities,
    "commutator_break": _corrupt_commutator,
    "numeric_off": _corrupt_numeric,
    "expr_break": _corrupt_expression,
    "spectrum_break": _corrupt_spectrum,
    "state_denorm": _corrupt_state_norm,
}


@dataclass(frozen=True)
class CorruptorConfig:
    """Which rules run and how often; rate=0 keeps the dataset positives-only."""

    rules: tuple[str, ...] = tuple(CORRUPTION_RULES)
    rate: float = 1.0
    seed: int = 0

    def __post_init__(self):
        unknown = set(self.rules) - set(CORRUPTION_RULES)
        if unknown:
            raise ValueError(f"unknown corruption rules {sorted(unknown)}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("rate must be in [0,1]")


def corrupt_record(record: SampleRecord, rule: str) -> SampleRecord | None:
    """Apply one rule to every claim it touches; None if nothing applied."""
    bundle = extract_claims(record.answer)
    if bundle.unparsable:
        return None
    fn = CORRUPTION_RULES[rule]
    replacements = {}
    for claim in bundle.claims:
        corrupted = fn(claim)
        if corrupted is not None:
            replacements[claim.span] = corrupted
    if not replacements:
        return None
    return dc_replace(
        record,
        id=f"{record.id}~{rule}",
        answer=replace_claims(record.answer, replacements),
    )


def corruption_copies(
    record: SampleRecord, config: CorruptorConfig
) -> list[SampleRecord]:
    copies = []
    for rule in config.rules:
        if config.rate <= 0.0:
            continue
        rng = random.Random(stable_seed(config.seed, record.id, rule))
        if config.rate < 1.0 and rng.random() >= config.rate:
            continue
        corrupted = corrupt_record(record, rule)
        if corrupted is not None:
            copies.append(corrupted)
    return copies


_FALLBACK_WEIGHT = {1: 0.9, 0: 0.5, -1: 0.8}


def annotate(
    record: SampleRecord,
    backend: JudgeBackend,
    check_config: CheckConfig | None = None,
    feature_config: FeatureConfig | None = None,
) -> TrainingExample:
    """Verify, judge, and featurize one record into a training example."""
    v, reports = verify(record, check_config)
    result = backend.score(record.question, record.answer, v, record.reference_answer)
    weights = result.weights
    if weights is None:
        weights = OracleWeights(
            _FALLBACK_WEIGHT[v.corr], _FALLBACK_WEIGHT[v.phys], _FALLBACK_WEIGHT[v.inst]
        )
    features = extract_features(
        record.question,
        record.answer,
        v,
        reports,
        task_type=record.task_type,
        config=feature_config,
    )
    return TrainingExample(
        question=record.question,
        answer=record.answer,
        v=v,
        s_star=result.scores,
        w_star=weights,
        task_type=record.task_type,
        example_id=record.id,
        reference_answer=record.reference_answer,
        features=features,
    )


def example_features(
    example: TrainingExample,
    check_config: CheckConfig | None = None,
    feature_config: FeatureConfig | None = None,
) -> np.ndarray:
    """Cached features, or a deterministic recomputation via re-verification."""
    if example.features is not None:
        return example.features
    record = SampleRecord(
        id=example.example_id or "synthetic",
        question=example.question,
        answer=example.answer,
        task_type=example.task_type or "problem_solving",
        reference_answer=example.reference_answer,
    )
    v, reports = verify(record, check_config)
    return extract_features(
        example.question,
        example.answer,
        v,
        reports,
        task_type=example.task_type,
        config=feature_config,
    )


def prepare_batch(
    examples: list[TrainingExample],
    check_config: CheckConfig | None = None,
    feature_config: FeatureConfig | None = None,
) -> Batch:
    """Stack examples into training arrays (features, v, s*, w*)."""
    if not examples:
        raise ValueError("dataset must be non-empty")
    x = np.stack(
        [example_features(e, check_config, feature_config) for e in examples]
    )
    v = np.asarray([e.v.as_tuple() for e in examples], dtype=np.float64)
    s_star = np.asarray([e.s_star.as_tuple() for e in examples])
    w_star = np.asarray([e.w_star.as_tuple() for e in examples])
    return Batch(x, v, s_star, w_star)


def build_oracle_dataset(
    fixtures: list[SampleRecord],
    backend: JudgeBackend,
    corruptor_config: CorruptorConfig | None = None,
    check_config: CheckConfig | None = None,
    feature_config: FeatureConfig | None = None,
) -> list[TrainingExample]:
    """Positives verbatim plus rule-corrupted hard negatives, all annotated."""
    corruptor_config = corruptor_config or CorruptorConfig()
    examples = []
    for record in fixtures:
        examples.append(annotate(record, backend, check_config, feature_config))
        for corrupted in corruption_copies(record, corruptor_config):
            examples.append(annotate(corrupted, backend, check_config, feature_config))
    return examples
