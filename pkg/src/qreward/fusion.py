"""Adaptive reward fusion: per-dimension trust blending of deterministic
verification with semantic scores, then a reliability-weighted sum.

Fused score per dimension k: lam(v_k) + (1 - lam(v_k)) * s_k, with
lam(+1) = 1 (fully trust successful verification), lam(0) = 0 (fall back to
the semantic score), and a small lam(-1) floor that weakens a failed check
without silencing the fine-grained semantic assessment. The total reward is
sum_k w_k * fused_k; weights are not renormalized, so the range is [0, 3].
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace as dc_replace

from .judge import (
    JudgeBackend,
    ReliabilityWeights,
    SemanticScores,
    score_semantic,
)
from .records import SampleRecord
from .ses import CheckConfig, CheckReport, VerificationVector, verify
from .util import stable_seed
from .vrm import VrmModel, extract_features

DEFAULT_LAMBDA_FAIL = 0.05

BREAKDOWN_SCHEMA = "reward-breakdown/1"

DIM_KEYS = ("Corr", "Phys", "Inst")


@dataclass(frozen=True)
class LambdaMap:
    """Trust levels per indicator; only the failure floor is tunable."""

    fail: float = DEFAULT_LAMBDA_FAIL

    def __post_init__(self):
        if not 0.0 < self.fail < 0.5:
            raise ValueError(f"lambda(-1) must satisfy 0 < eps < 0.5, got {self.fail}")

    def __call__(self, indicator: int) -> float:
        if indicator == 1:
            return 1.0
        if indicator == 0:
            return 0.0
        if indicator == -1:
            return self.fail
        raise ValueError(f"indicator must be in {{-1,0,1}}, got {indicator!r}")


def fuse(
    v: VerificationVector, s: SemanticScores, lam: LambdaMap | None = None
) -> tuple[float, float, float]:
    """Per-dimension fused scores, each in [0,1]."""
    lam = lam or LambdaMap()
    return tuple(
        lam(indicator) + (1.0 - lam(indicator)) * score
        for indicator, score in zip(v.as_tuple(), s.as_tuple())
    )


def aggregate(w: ReliabilityWeights, fused: tuple[float, float, float]) -> float:
    """Reliability-weighted sum over fused scores (no normalizer)."""
    return (
        w.corr * fused[0] + w.phys * fused[1] + w.inst * fused[2]
    )


@dataclass(frozen=True)
class RewardBreakdown:
    v: VerificationVector
    s: SemanticScores
    lam: tuple[float, float, float]
    fused: tuple[float, float, float]
    weights: ReliabilityWeights
    total: float
    mode: str  # "vrm" | "passthrough"
    reports: tuple[CheckReport, ...] = field(default_factory=tuple)

    def contributions(self) -> tuple[float, float, float]:
        return (
            self.weights.corr * self.fused[0],
            self.weights.phys * self.fused[1],
            self.weights.inst * self.fused[2],
        )

    def to_json_dict(self) -> dict:
        contribs = self.contributions()
        return {
            "schema": BREAKDOWN_SCHEMA,
            "mode": self.mode,
            "v": self.v.to_json_dict(),
            "s": self.s.to_json_dict(),
            "lambda": dict(zip(DIM_KEYS, self.lam)),
            "fused": dict(zip(DIM_KEYS, self.fused)),
            "weights": self.weights.to_json_dict(),
            "contributions": dict(zip(DIM_KEYS, contribs)),
            "total": self.total,
            "checks": [r.to_json_dict() for r in self.reports],
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "RewardBreakdown":
        return RewardBreakdown(
            v=VerificationVector.from_json_dict(obj["v"]),
            s=SemanticScores.from_json_dict(obj["s"]),
            lam=tuple(obj["lambda"][k] for k in DIM_KEYS),
            fused=tuple(obj["fused"][k] for k in DIM_KEYS),
            weights=ReliabilityWeights.from_json_dict(obj["weights"]),
            total=float(obj["total"]),
            mode=obj["mode"],
            reports=tuple(
                CheckReport.from_json_dict(r) for r in obj.get("checks", [])
            ),
        )


def reward(
    question: str,
    answer: str,
    model: VrmModel | None,
    backend: JudgeBackend,
    lam: LambdaMap | None = None,
    mode: str = "vrm",
    check_config: CheckConfig | None = None,
    reference: str | None = None,
    task_type: str | None = None,
    seed: int | None = None,
    verification: tuple[VerificationVector, list[CheckReport]] | None = None,
) -> RewardBreakdown:
    """Verify, score, fuse, aggregate.

    mode="vrm" takes s and w from the trained heads (never fails);
    mode="passthrough" takes s from the judge backend (and w from its
    importance weights when present, else all-ones), propagating
    JudgeUnavailable. Passing ``verification`` overrides the verifier run;
    a zeroed override ablates verification end to end.
    """
    lam = lam or LambdaMap()
    if mode not in ("vrm", "passthrough"):
        raise ValueError(f"unknown mode {mode!r}")
    check_config = check_config or CheckConfig()
    if seed is not None:
        check_config = dc_replace(check_config, seed=seed)
    if verification is None:
        record = SampleRecord(
            id=f"req-{stable_seed(question, answer) % 10**8}",
            question=question,
            answer=answer,
            task_type=task_type or "problem_solving",
            reference_answer=reference,
        )
        v, reports = verify(record, check_config)
    else:
        v, reports = verification

    if mode == "vrm":
        if model is None:
            raise ValueError("vrm mode requires a model")
        h = extract_features(
            question, answer, v, reports, task_type=task_type,
            config=model.feature_config,
        )
        s, w = model.forward(h, v)
    else:
        s, judge_weights = score_semantic(backend, question, answer, v, reference)
        w = judge_weights if judge_weights is not None else ReliabilityWeights(1, 1, 1)

    fused = fuse(v, s, lam)
    total = aggregate(w, fused)
    return RewardBreakdown(
        v=v,
        s=s,
        lam=tuple(lam(i) for i in v.as_tuple()),
        fused=fused,
        weights=w,
        total=total,
        mode=mode,
        reports=tuple(reports),
    )


def best_of_n(
    question: str,
    candidates: list[str],
    model: VrmModel | None,
    backend: JudgeBackend,
    lam: LambdaMap | None = None,
    **kwargs,
) -> tuple[int, list[RewardBreakdown]]:
    """Argmax-reward candidate; ties break to the lowest index."""
    if not candidates:
        raise ValueError("candidates must be non-empty")
    breakdowns = [
        reward(question, answer, model, backend, lam, **kwargs)
        for answer in candidates
    ]
    best = 0
    for i, b in enumerate(breakdowns):
        if b.total > breakdowns[best].total:
            best = i
    return best, breakdowns
