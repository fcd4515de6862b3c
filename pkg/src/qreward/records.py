"""Corpus data units shared by the verifier, pipeline, and service layers."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator

TASK_TYPES = (
    "short_answer",
    "fill_blank",
    "true_false",
    "multiple_choice",
    "problem_solving",
)
DIFFICULTIES = ("easy", "medium", "hard")


@dataclass(frozen=True)
class SampleRecord:
    id: str
    question: str
    answer: str
    task_type: str = "problem_solving"
    topic: str = ""
    difficulty: str = "medium"
    reference_answer: str | None = None
    think_trace: str | None = None

    def __post_init__(self):
        if self.task_type not in TASK_TYPES:
            raise ValueError(f"unknown task_type {self.task_type!r}")
        if self.difficulty not in DIFFICULTIES:
            raise ValueError(f"unknown difficulty {self.difficulty!r}")

    def to_json_dict(self) -> dict:
        obj = asdict(self)
        return {k: v for k, v in obj.items() if v is not None}

    @staticmethod
    def from_json_dict(obj: dict) -> "SampleRecord":
        known = {f for f in SampleRecord.__dataclass_fields__}
        return SampleRecord(**{k: v for k, v in obj.items() if k in known})


def read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def load_corpus(path: str | Path) -> list[SampleRecord]:
    return [SampleRecord.from_json_dict(obj) for obj in read_jsonl(path)]


def save_corpus(path: str | Path, records: Iterable[SampleRecord]) -> None:
    write_jsonl(path, (r.to_json_dict() for r in records))


def unique_ids(records: Iterable[SampleRecord]) -> Iterator[SampleRecord]:
    """Yield records, raising on duplicate ids (corpus invariant)."""
    seen: set[str] = set()
    for record in records:
        if record.id in seen:
            raise ValueError(f"duplicate record id {record.id!r}")
        seen.add(record.id)
        yield record
