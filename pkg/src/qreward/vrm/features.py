"""Deterministic feature extraction standing in for a learned encoder.

A fixed-length vector: 240 hashed character-trigram count buckets over
(question || answer), L2-normalized, concatenated with 16 structured
features. The verification vector itself is NEVER embedded here: by
architecture it reaches only the weight-allocation head, so the scoring
head stays verification-blind. Check pass ratios, being text-level
structure, are allowed.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from ..records import TASK_TYPES
from ..ses import CheckReport, extract_claims
from ..ses.verify import VerificationVector

FEATURE_VERSION = "trigram240+struct16/1"

TRIGRAM_BUCKETS = 240
STRUCTURED_FEATURES = 16
FEATURE_DIM = TRIGRAM_BUCKETS + STRUCTURED_FEATURES


@dataclass(frozen=True)
class FeatureConfig:
    version: str = FEATURE_VERSION
    trigram_buckets: int = TRIGRAM_BUCKETS
    structured: int = STRUCTURED_FEATURES

    @property
    def dim(self) -> int:
        return self.trigram_buckets + self.structured

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "trigram_buckets": self.trigram_buckets,
            "structured": self.structured,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "FeatureConfig":
        return FeatureConfig(
            version=obj["version"],
            trigram_buckets=int(obj["trigram_buckets"]),
            structured=int(obj["structured"]),
        )


def trigram_counts(text: str, buckets: int) -> np.ndarray:
    counts = np.zeros(buckets, dtype=np.float64)
    data = text.encode("utf-8", errors="replace")
    for i in range(len(data) - 2):
        counts[zlib.crc32(data[i : i + 3]) % buckets] += 1.0
    return counts


def _pass_ratio(reports: list[CheckReport], prefix: str) -> float:
    # 0 when nothing executed; the executed-fraction feature disambiguates
    executed = [r for r in reports if r.check_id.startswith(prefix) and r.status != 0]
    if not executed:
        return 0.0
    return sum(1 for r in executed if r.status == 1) / len(executed)


def extract_features(
    question: str,
    answer: str,
    v: VerificationVector,
    reports: list[CheckReport],
    task_type: str | None = None,
    config: FeatureConfig | None = None,
) -> np.ndarray:
    """Deterministic feature vector; ``v`` is accepted for signature parity
    with the model forward pass but deliberately unused (see module doc)."""
    del v
    config = config or FeatureConfig()
    tri = trigram_counts(question + "\x1f" + answer, config.trigram_buckets)
    norm = float(np.linalg.norm(tri))
    if norm > 0:
        tri = tri / norm

    bundle = extract_claims(answer)
    executed = sum(1 for r in reports if r.status != 0)
    failed = sum(1 for r in reports if r.status == -1)
    total = max(len(reports), 1)

    structured = np.zeros(config.structured, dtype=np.float64)
    structured[0] = min(len(answer), 8000) / 8000.0
    structured[1] = math.log1p(len(answer)) / 10.0
    structured[2] = min(len(bundle), 8) / 8.0
    structured[3] = 1.0 if "<think>" in answer else 0.0
    structured[4] = 1.0 if bundle.unparsable else 0.0
    structured[5] = _pass_ratio(reports, "M")
    structured[6] = _pass_ratio(reports, "P")
    structured[7] = executed / total
    structured[8] = failed / total
    if task_type in TASK_TYPES:
        structured[9 + TASK_TYPES.index(task_type)] = 1.0
    structured[14] = min(len(question), 2000) / 2000.0
    structured[15] = 1.0 if answer.strip() else 0.0

    return np.concatenate([tri, structured])
