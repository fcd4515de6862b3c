"""Trinary verification vector and per-dimension aggregation.

Indicators: +1 constraint satisfied, -1 violation detected, 0 execution
unavailable. Corr and Phys are verifiable dimensions (fed by the M- and
P-checks respectively); Inst is purely semantic and always carries 0 because
no formal solver exists for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

PASS = 1
UNAVAILABLE = 0
FAIL = -1

INDICATORS = (PASS, UNAVAILABLE, FAIL)


class EvalDimension(str, Enum):
    CORR = "Corr"
    PHYS = "Phys"
    INST = "Inst"

    @property
    def verifiable(self) -> bool:
        return self in (EvalDimension.CORR, EvalDimension.PHYS)


VERIFIABLE_DIMENSIONS = (EvalDimension.CORR, EvalDimension.PHYS)
SEMANTIC_DIMENSIONS = (EvalDimension.INST,)
ALL_DIMENSIONS = (EvalDimension.CORR, EvalDimension.PHYS, EvalDimension.INST)


@dataclass(frozen=True)
class VerificationVector:
    corr: int = UNAVAILABLE
    phys: int = UNAVAILABLE
    inst: int = UNAVAILABLE

    def __post_init__(self):
        for value in (self.corr, self.phys, self.inst):
            if value not in INDICATORS:
                raise ValueError(f"indicator must be in {{-1,0,1}}, got {value!r}")
        if self.inst != UNAVAILABLE:
            raise ValueError("Inst has no formal solver; its indicator is always 0")

    def __getitem__(self, dim: EvalDimension) -> int:
        return {
            EvalDimension.CORR: self.corr,
            EvalDimension.PHYS: self.phys,
            EvalDimension.INST: self.inst,
        }[dim]

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.corr, self.phys, self.inst)

    def to_json_dict(self) -> dict[str, int]:
        return {"Corr": self.corr, "Phys": self.phys, "Inst": self.inst}

    @staticmethod
    def from_json_dict(obj: dict) -> "VerificationVector":
        return VerificationVector(
            corr=int(obj.get("Corr", 0)),
            phys=int(obj.get("Phys", 0)),
            inst=int(obj.get("Inst", 0)),
        )

    @staticmethod
    def zero() -> "VerificationVector":
        return VerificationVector(0, 0, 0)


def combine_indicators(indicators: list[int]) -> int:
    """Any -1 dominates, else any +1, else 0 (per-dimension aggregation)."""
    if FAIL in indicators:
        return FAIL
    if PASS in indicators:
        return PASS
    return UNAVAILABLE
