"""Corpus-level hybrid verification: near-duplicate removal, automated
verification with semantic auditing, stratified human batch audit, and the
deterministic-vs-semantic confusion analysis.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from .judge import (
    JudgeBackend,
    JudgeUnavailable,
    SemanticScores,
    classify_semantic,
    score_semantic,
)
from .records import SampleRecord
from .ses import CheckConfig, CheckReport, VerificationVector, extract_claims, verify
from .util import stable_seed

DEFAULT_UPSILON = 0.85
DEFAULT_ZETA = 0.8
DEFAULT_TAU = 0.05
DEFAULT_SAMPLE_FRACTION = 0.05

SimilarityFn = Callable[[str, str], float]


# ---------------------------------------------------------------------------
# near-duplicate detection: cosine over character-trigram counts, pluggable


def trigram_profile(text: str) -> Counter:
    data = text.lower()
    return Counter(data[i : i + 3] for i in range(len(data) - 2))


def _cosine(a: Counter, b: Counter) -> float:
    if not a or not b:
        return 0.0
    shared = set(a) & set(b)
    dot = sum(a[g] * b[g] for g in shared)
    norm_a = math.sqrt(sum(v * v for v in a.values()))
    norm_b = math.sqrt(sum(v * v for v in b.values()))
    return dot / (norm_a * norm_b)


def trigram_cosine(text_a: str, text_b: str) -> float:
    return _cosine(trigram_profile(text_a), trigram_profile(text_b))


@dataclass(frozen=True)
class DroppedPair:
    dropped_id: str
    kept_id: str
    similarity: float


def dedup(
    records: list[SampleRecord],
    upsilon: float = DEFAULT_UPSILON,
    similarity: SimilarityFn | None = None,
) -> tuple[list[SampleRecord], list[DroppedPair]]:
    """Greedy first-kept scan: drop a record iff its question is at least
    ``upsilon``-similar to an already-kept question."""
    if not 0.0 < upsilon <= 1.0:
        raise ValueError(f"upsilon must be in (0,1], got {upsilon}")
    kept: list[SampleRecord] = []
    dropped: list[DroppedPair] = []
    if similarity is None:
        # default backend precomputes trigram profiles once
        profiles = [trigram_profile(r.question) for r in records]
        kept_profiles: list[Counter] = []
        for record, profile in zip(records, profiles):
            hit = None
            for kept_record, kept_profile in zip(kept, kept_profiles):
                value = _cosine(profile, kept_profile)
                if value >= upsilon:
                    hit = DroppedPair(record.id, kept_record.id, value)
                    break
            if hit is None:
                kept.append(record)
                kept_profiles.append(profile)
            else:
                dropped.append(hit)
        return kept, dropped
    for record in records:
        hit = None
        for kept_record in kept:
            value = similarity(record.question, kept_record.question)
            if value >= upsilon:
                hit = DroppedPair(record.id, kept_record.id, value)
                break
        if hit is None:
            kept.append(record)
        else:
            dropped.append(hit)
    return kept, dropped


# ---------------------------------------------------------------------------
# layer-1 automated verification


@dataclass
class VerificationRecord:
    sample_id: str
    v: VerificationVector
    reports: tuple[CheckReport, ...]
    scores: SemanticScores | None
    semantic_pass: bool
    deterministic_pass: bool
    verdict: str  # pass | fail | unparsable
    task_type: str = "problem_solving"
    difficulty: str = "medium"

    def to_json_dict(self) -> dict:
        return {
            "id": self.sample_id,
            "v": self.v.to_json_dict(),
            "reports": [r.to_json_dict() for r in self.reports],
            "scores": self.scores.to_json_dict() if self.scores else None,
            "semantic_pass": self.semantic_pass,
            "deterministic_pass": self.deterministic_pass,
            "verdict": self.verdict,
            "task_type": self.task_type,
            "difficulty": self.difficulty,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "VerificationRecord":
        return VerificationRecord(
            sample_id=obj["id"],
            v=VerificationVector.from_json_dict(obj["v"]),
            reports=tuple(CheckReport.from_json_dict(r) for r in obj.get("reports", [])),
            scores=(
                SemanticScores.from_json_dict(obj["scores"])
                if obj.get("scores") is not None
                else None
            ),
            semantic_pass=bool(obj["semantic_pass"]),
            deterministic_pass=bool(obj["deterministic_pass"]),
            verdict=obj["verdict"],
            task_type=obj.get("task_type", "problem_solving"),
            difficulty=obj.get("difficulty", "medium"),
        )


def _protocol_one(
    record: SampleRecord,
    backend: JudgeBackend,
    zeta: float,
    check_config: CheckConfig,
) -> VerificationRecord:
    bundle = extract_claims(record.answer)
    v, reports = verify(record, check_config)
    deterministic_pass = v.corr == 1 and v.phys == 1
    try:
        scores, _ = score_semantic(
            backend, record.question, record.answer, v, record.reference_answer
        )
        semantic_pass = classify_semantic(scores, zeta)
    except JudgeUnavailable:
        scores = None
        semantic_pass = False
    if bundle.unparsable or scores is None:
        verdict = "unparsable"
    elif v.corr == -1 or v.phys == -1 or not semantic_pass:
        verdict = "fail"
    else:
        verdict = "pass"
    return VerificationRecord(
        sample_id=record.id,
        v=v,
        reports=tuple(reports),
        scores=scores,
        semantic_pass=semantic_pass,
        deterministic_pass=deterministic_pass,
        verdict=verdict,
        task_type=record.task_type,
        difficulty=record.difficulty,
    )


def run_protocol(
    records: list[SampleRecord],
    backend: JudgeBackend,
    zeta: float = DEFAULT_ZETA,
    check_config: CheckConfig | None = None,
    max_workers: int = 1,
) -> list[VerificationRecord]:
    """Automated verification over a corpus; output sorted by sample id."""
    check_config = check_config or CheckConfig()
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(
                pool.map(
                    lambda r: _protocol_one(r, backend, zeta, check_config), records
                )
            )
    else:
        results = [_protocol_one(r, backend, zeta, check_config) for r in records]
    return sorted(results, key=lambda vr: vr.sample_id)


# ---------------------------------------------------------------------------
# layer-2 human batch audit


class MissingVerdict(ValueError):
    def __init__(self, missing: list[str]):
        super().__init__(f"missing human verdicts for sampled ids: {missing}")
        self.missing = missing


@dataclass(frozen=True)
class AuditConfig:
    tau: float = DEFAULT_TAU
    sample_fraction: float = DEFAULT_SAMPLE_FRACTION
    stratify_key: str = "task_type"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must be in (0,1)")
        if not 0.0 < self.sample_fraction <= 1.0:
            raise ValueError("sample_fraction must be in (0,1]")


def stratified_sample(
    records: list[SampleRecord], cfg: AuditConfig
) -> list[SampleRecord]:
    """ceil(fraction*N) records, proportionally allocated per stratum with
    largest-remainder rounding; fully determined by the seed."""
    if not records:
        return []
    target = math.ceil(cfg.sample_fraction * len(records))
    groups: dict[str, list[SampleRecord]] = {}
    for record in records:
        groups.setdefault(getattr(record, cfg.stratify_key), []).append(record)
    names = sorted(groups)
    exact = {name: cfg.sample_fraction * len(groups[name]) for name in names}
    alloc = {name: min(math.floor(exact[name]), len(groups[name])) for name in names}
    deficit = target - sum(alloc.values())
    by_remainder = sorted(
        names, key=lambda name: (-(exact[name] - math.floor(exact[name])), name)
    )
    i = 0
    while deficit > 0 and i < 10 * len(names):
        name = by_remainder[i % len(names)]
        if alloc[name] < len(groups[name]):
            alloc[name] += 1
            deficit -= 1
        i += 1
    sampled: list[SampleRecord] = []
    for name in names:
        members = sorted(groups[name], key=lambda r: r.id)
        rng = random.Random(stable_seed(cfg.seed, "audit", name))
        sampled.extend(rng.sample(members, alloc[name]))
    return sorted(sampled, key=lambda r: r.id)


@dataclass(frozen=True)
class AuditDecision:
    decision: str  # accept | reject
    error_rate: float
    sample_size: int
    errors: int
    sampled_ids: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "decision": self.decision,
            "error_rate": self.error_rate,
            "sample_size": self.sample_size,
            "errors": self.errors,
            "sampled_ids": list(self.sampled_ids),
        }


def audit_batch(
    records: list[SampleRecord],
    human_verdicts: dict[str, str],
    cfg: AuditConfig | None = None,
) -> AuditDecision:
    """Reject the batch iff the sampled error rate strictly exceeds tau."""
    cfg = cfg or AuditConfig()
    sampled = stratified_sample(records, cfg)
    missing = [r.id for r in sampled if r.id not in human_verdicts]
    if missing:
        raise MissingVerdict(missing)
    errors = sum(1 for r in sampled if human_verdicts[r.id] == "error")
    error_rate = errors / len(sampled) if sampled else 0.0
    decision = "reject" if error_rate > cfg.tau else "accept"
    return AuditDecision(
        decision=decision,
        error_rate=error_rate,
        sample_size=len(sampled),
        errors=errors,
        sampled_ids=tuple(r.id for r in sampled),
    )


# ---------------------------------------------------------------------------
# confusion analysis and corpus statistics


@dataclass(frozen=True)
class ConfusionMatrix:
    det_pass_sem_pass: int
    det_pass_sem_fail: int
    det_fail_sem_pass: int
    det_fail_sem_fail: int

    @property
    def total(self) -> int:
        return (
            self.det_pass_sem_pass
            + self.det_pass_sem_fail
            + self.det_fail_sem_pass
            + self.det_fail_sem_fail
        )

    def cells(self) -> tuple[int, int, int, int]:
        return (
            self.det_pass_sem_pass,
            self.det_pass_sem_fail,
            self.det_fail_sem_pass,
            self.det_fail_sem_fail,
        )

    def to_json_dict(self) -> dict:
        total = max(self.total, 1)
        cells = {
            "det_pass_sem_pass": self.det_pass_sem_pass,
            "det_pass_sem_fail": self.det_pass_sem_fail,
            "det_fail_sem_pass": self.det_fail_sem_pass,
            "det_fail_sem_fail": self.det_fail_sem_fail,
        }
        return {
            "counts": cells,
            "percent": {k: 100.0 * v / total for k, v in cells.items()},
            "total": self.total,
        }


def _semantic_pass_at(record: VerificationRecord, zeta: float) -> bool:
    if record.scores is not None:
        return classify_semantic(record.scores, zeta)
    return record.semantic_pass


def confusion_matrix(
    records: list[VerificationRecord], zeta: float = DEFAULT_ZETA
) -> ConfusionMatrix:
    counts = {(True, True): 0, (True, False): 0, (False, True): 0, (False, False): 0}
    for record in records:
        counts[(record.deterministic_pass, _semantic_pass_at(record, zeta))] += 1
    return ConfusionMatrix(
        det_pass_sem_pass=counts[(True, True)],
        det_pass_sem_fail=counts[(True, False)],
        det_fail_sem_pass=counts[(False, True)],
        det_fail_sem_fail=counts[(False, False)],
    )


def corpus_stats(
    records: list[VerificationRecord], zeta: float = DEFAULT_ZETA
) -> dict:
    """Per-dimension semantic pass rates at zeta, verdict/task/difficulty
    histograms, and the failing-check error-pattern summary."""
    scored = [r for r in records if r.scores is not None]
    denominator = max(len(scored), 1)
    rates = {}
    for key, pick in (
        ("Corr", lambda s: s.corr),
        ("Phys", lambda s: s.phys),
        ("Inst", lambda s: s.inst),
    ):
        passing = sum(1 for r in scored if pick(r.scores) >= zeta - 1e-12)
        rates[key] = passing / denominator
    check_failures: Counter = Counter()
    for record in records:
        for report in record.reports:
            if report.status == -1:
                check_failures[report.check_id] += 1
    return {
        "count": len(records),
        "scored": len(scored),
        "zeta": zeta,
        "semantic_pass_rate": rates,
        "verdicts": dict(Counter(r.verdict for r in records)),
        "task_types": dict(Counter(r.task_type for r in records)),
        "difficulties": dict(Counter(r.difficulty for r in records)),
        "check_failures": dict(check_failures),
    }
