"""Multidimensional semantic scoring behind a pluggable backend interface.

Backends score (question, answer) on Corr/Phys/Inst in [0,1], optionally
emitting per-dimension importance weights (the oracle-annotation mode used
to build reward-model training data). ``StubJudge`` is a deterministic
feature-based scorer for desk-scale runs and tests; ``RemoteJudge`` speaks
the HTTP wire format in docs/api.md; ``EnsembleJudge`` averages several
backends per dimension.
"""

from __future__ import annotations

import json
import random
import re
import threading
from dataclasses import dataclass
from typing import Protocol

import httpx

from .ses import VerificationVector, extract_claims
from .util import stable_seed

JUDGE_TOKEN_ENV = "QREWARD_JUDGE_TOKEN"
TEMPLATE_ID = "table5"

# Canonical judge prompt for TEMPLATE_ID, sent alongside the structured
# fields so template-less judge services can run it directly.
JUDGE_PROMPT_TEMPLATE = """\
System Instruction:
You are an expert AI evaluator assessing the reasoning process of a model. \
Your objective is to synthesize external verifier signals with the original \
query and response to generate fine-grained, multidimensional soft scores \
and their corresponding adaptive confidence weights.

Context:
Original Query: {question}
Model Response: {answer}
External Verifier Output: {verification}

Task:
Evaluate the response across three specific dimensions based on the query \
and the verifier signal. For each dimension, assign a soft score (0-1) and \
a confidence weight (0-1).

Dimensions:
1. Mathematical Correctness (Corr): Is the calculation formally correct? \
Use the verifier signal as ground truth.
2. Physical Consistency (Phys): Does the reasoning follow quantum mechanics \
principles?
3. Instruction Following (Inst): Did the model follow constraints (e.g., \
format, method)?

Output Format JSON:
{{
  "scores": {{ "Corr": float, "Phys": float, "Inst": float }},
  "weights": {{ "Corr": float, "Phys": float, "Inst": float }},
  "rationale": "Brief explanation..."
}}
"""


def clamp01(value: float) -> float:
    return min(1.0, max(0.0, float(value)))


@dataclass(frozen=True)
class DimensionTriple:
    """A per-dimension real triple in [0,1]^3 (scores or weights)."""

    corr: float
    phys: float
    inst: float

    def __post_init__(self):
        for value in (self.corr, self.phys, self.inst):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"value {value!r} outside [0,1]")

    @staticmethod
    def clamped(corr: float, phys: float, inst: float) -> "DimensionTriple":
        return DimensionTriple(clamp01(corr), clamp01(phys), clamp01(inst))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.corr, self.phys, self.inst)

    def mean(self) -> float:
        return (self.corr + self.phys + self.inst) / 3.0

    def to_json_dict(self) -> dict[str, float]:
        return {"Corr": self.corr, "Phys": self.phys, "Inst": self.inst}

    @staticmethod
    def from_json_dict(obj: dict) -> "DimensionTriple":
        return DimensionTriple.clamped(
            float(obj["Corr"]), float(obj["Phys"]), float(obj["Inst"])
        )


SemanticScores = DimensionTriple
OracleWeights = DimensionTriple
ReliabilityWeights = DimensionTriple


@dataclass(frozen=True)
class JudgeResult:
    scores: SemanticScores
    weights: OracleWeights | None
    rationale: str


class JudgeUnavailable(RuntimeError):
    """The judge could not produce scores; callers must treat scores as
    absent, never as zeros."""


class JudgeBackend(Protocol):
    def score(
        self,
        question: str,
        answer: str,
        v: VerificationVector,
        reference: str | None = None,
    ) -> JudgeResult: ...


def render_judge_prompt(
    question: str, answer: str, v: VerificationVector
) -> str:
    return JUDGE_PROMPT_TEMPLATE.format(
        question=question,
        answer=answer,
        verification=json.dumps(v.to_json_dict()),
    )


_WORD_RE = re.compile(r"[a-z0-9_^*/+-]+")


def _tokens(text: str) -> set[str]:
    return set(_WORD_RE.findall(text.lower()))


def keyword_coverage(answer: str, reference: str | None) -> float:
    """Fraction of reference tokens present in the answer (0.5 if no ref)."""
    if not reference:
        return 0.5
    ref_tokens = _tokens(reference)
    if not ref_tokens:
        return 0.5
    return len(_tokens(answer) & ref_tokens) / len(ref_tokens)


def length_band(answer: str) -> float:
    n = len(answer)
    if n < 40:
        return 0.25
    if n > 4000:
        return 0.5
    return 1.0


_PASS_SIGNAL = {1: 1.0, 0: 0.5, -1: 0.0}
_WEIGHT_BASE = {1: 0.9, 0: 0.5, -1: 0.8}


class StubJudge:
    """Deterministic feature-based judge: claim pass signal per dimension,
    answer length band, and keyword coverage against the reference, plus a
    small seeded jitter so score distributions are not degenerate."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def score(
        self,
        question: str,
        answer: str,
        v: VerificationVector,
        reference: str | None = None,
    ) -> JudgeResult:
        if not answer.strip():
            return JudgeResult(
                scores=SemanticScores(0.0, 0.0, 0.0),
                weights=self._weights(question, answer, v),
                rationale="empty answer",
            )
        coverage = keyword_coverage(answer, reference)
        band = length_band(answer)
        bundle = extract_claims(answer)
        has_claims = 1.0 if (len(bundle) > 0 and not bundle.unparsable) else 0.0
        has_think = 1.0 if "<think>" in answer else 0.0

        def jitter(dim: str, scale: float = 0.01) -> float:
            rng = random.Random(stable_seed(self.seed, "stub", dim, question, answer))
            return rng.uniform(-scale, scale)

        corr = 0.10 + 0.62 * _PASS_SIGNAL[v.corr] + 0.18 * coverage + 0.10 * band
        phys = 0.10 + 0.62 * _PASS_SIGNAL[v.phys] + 0.18 * coverage + 0.10 * band
        inst = (
            0.30
            + 0.25 * band
            + 0.25 * has_claims
            + 0.10 * has_think
            + 0.10 * coverage
        )
        scores = SemanticScores.clamped(
            corr + jitter("Corr"), phys + jitter("Phys"), inst + jitter("Inst")
        )
        rationale = (
            f"pass signals {v.as_tuple()}, coverage {coverage:.2f}, "
            f"band {band:.2f}, claims {has_claims:.0f}"
        )
        return JudgeResult(scores, self._weights(question, answer, v), rationale)

    def _weights(
        self, question: str, answer: str, v: VerificationVector
    ) -> OracleWeights:
        # executed verification earns high importance; unavailable stays low
        def one(dim: str, indicator: int) -> float:
            rng = random.Random(
                stable_seed(self.seed, "stub-w", dim, question, answer)
            )
            return clamp01(_WEIGHT_BASE[indicator] + rng.uniform(-0.05, 0.05))

        return OracleWeights(
            one("Corr", v.corr), one("Phys", v.phys), one("Inst", v.inst)
        )


class EnsembleJudge:
    """Average several backends per dimension (oracle-ensemble mode)."""

    def __init__(self, backends: list[JudgeBackend]):
        if not backends:
            raise ValueError("ensemble requires at least one backend")
        self.backends = list(backends)

    def score(
        self,
        question: str,
        answer: str,
        v: VerificationVector,
        reference: str | None = None,
    ) -> JudgeResult:
        results = [b.score(question, answer, v, reference) for b in self.backends]
        n = len(results)
        scores = SemanticScores.clamped(
            sum(r.scores.corr for r in results) / n,
            sum(r.scores.phys for r in results) / n,
            sum(r.scores.inst for r in results) / n,
        )
        weighted = [r.weights for r in results if r.weights is not None]
        weights = None
        if weighted:
            m = len(weighted)
            weights = OracleWeights.clamped(
                sum(w.corr for w in weighted) / m,
                sum(w.phys for w in weighted) / m,
                sum(w.inst for w in weighted) / m,
            )
        rationale = " | ".join(r.rationale for r in results)
        return JudgeResult(scores, weights, rationale)


class RemoteJudge:
    """HTTP judge speaking the table5 wire format (docs/api.md).

    POSTs {"question", "answer", "verification", "template", "prompt"} and
    expects a JSON body with a "scores" object; one re-ask on a malformed
    body, then JudgeUnavailable. In-flight requests are capped.
    """

    def __init__(
        self,
        endpoint: str,
        timeout: float = 30.0,
        max_inflight: int = 8,
        token: str | None = None,
        client: httpx.Client | None = None,
    ):
        import os

        self.endpoint = endpoint
        self.timeout = timeout
        self._semaphore = threading.BoundedSemaphore(max_inflight)
        self._token = token if token is not None else os.environ.get(JUDGE_TOKEN_ENV)
        self._client = client or httpx.Client(timeout=timeout)

    def score(
        self,
        question: str,
        answer: str,
        v: VerificationVector,
        reference: str | None = None,
    ) -> JudgeResult:
        payload = {
            "question": question,
            "answer": answer,
            "verification": v.to_json_dict(),
            "template": TEMPLATE_ID,
            "prompt": render_judge_prompt(question, answer, v),
        }
        headers = {}
        if self._token:
            headers["Authorization"] = f"Bearer {self._token}"
        last_error: Exception | None = None
        for _ in range(2):  # one re-ask on malformed output
            with self._semaphore:
                try:
                    response = self._client.post(
                        self.endpoint, json=payload, headers=headers
                    )
                except httpx.HTTPError as exc:
                    raise JudgeUnavailable(f"judge request failed: {exc}") from exc
            try:
                if response.status_code != 200:
                    raise ValueError(f"judge returned HTTP {response.status_code}")
                body = response.json()
                scores = SemanticScores.from_json_dict(body["scores"])
                weights = (
                    OracleWeights.from_json_dict(body["weights"])
                    if "weights" in body
                    else None
                )
                return JudgeResult(scores, weights, str(body.get("rationale", "")))
            except (ValueError, KeyError, TypeError) as exc:
                last_error = exc
                continue
        raise JudgeUnavailable(f"judge output malformed after re-ask: {last_error}")


def score_semantic(
    backend: JudgeBackend,
    question: str,
    answer: str,
    v: VerificationVector,
    reference: str | None = None,
) -> tuple[SemanticScores, OracleWeights | None]:
    result = backend.score(question, answer, v, reference)
    return result.scores, result.weights


def classify_semantic(scores: SemanticScores, zeta: float) -> bool:
    """True iff the mean of the three dimension scores reaches ``zeta``.

    The comparison absorbs 1e-12 of float rounding so exact-decimal boundary
    cases (mean of 0.7/0.8/0.9 against 0.8) stay inclusive.
    """
    if not 0.0 <= zeta <= 1.0:
        raise ValueError(f"zeta must be in [0,1], got {zeta!r}")
    return scores.mean() >= zeta - 1e-12
