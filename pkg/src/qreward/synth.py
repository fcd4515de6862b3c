"""Seeded synthetic corpora: templated valid records, rule-corrupted
negatives, and candidate pools with a known latent quality.

Everything here is deterministic in the seed, which is what lets corpus
statistics, audits, and ranking experiments be replayed exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import replace as dc_replace

from .records import SampleRecord, TASK_TYPES
from .util import stable_seed
from .vrm.oracle_data import CORRUPTION_RULES, corrupt_record

_DIFFICULTIES = ("easy", "medium", "hard")


def _ladder_record(rng: random.Random, index: int) -> SampleRecord:
    k = rng.randint(1, 4)
    question = (
        f"A single-mode field evolves under H = {k}*hbar*w*a^dag*a. Find a(t) "
        "in the Heisenberg picture and check the equal-time commutator."
    )
    reference = (
        f"a(t) = a_0*exp(-I*{k}*w*t); the equal-time commutator stays exactly 1.\n"
        f"@claim{{kind=final_expression, expr=a_0*exp(-I*{k}*w*t)}}"
    )
    answer = (
        f"The Heisenberg equation gives da/dt = -I*{k}*w*a, so the mode "
        f"operator rotates in phase:\n"
        f"@claim{{kind=final_expression, expr=a_0*exp(-I*{k}*w*t)}}\n"
        "The opposite phases cancel in the equal-time commutator, leaving the "
        "canonical value one at all times.\n"
        f"@claim{{kind=commutator, a=exp(-I*{k}*w*t)*lower, "
        f"b=exp(I*{k}*w*t)*raise, result=1}}\n"
    )
    return SampleRecord(
        id=f"syn-ladder-{index:05d}",
        task_type="problem_solving",
        topic="quantum optics",
        difficulty=rng.choice(_DIFFICULTIES),
        question=question,
        answer=answer,
        reference_answer=reference,
    )


def _box_record(rng: random.Random, index: int) -> SampleRecord:
    n = rng.randint(1, 4)
    m = round(rng.uniform(0.5, 2.0), 3)
    L = round(rng.uniform(0.5, 2.0), 3)
    energy = n**2 * math.pi**2 / (2.0 * m * L**2)
    question = (
        f"A particle of mass {m} in a box of width {L}: compute the energy of "
        f"the n={n} level in natural units."
    )
    reference = (
        f"E_n = n^2*pi^2*hbar^2/(2*m*L^2); at n={n} this is {energy!r}.\n"
        "@claim{kind=final_expression, expr=n^2*pi^2*hbar^2/(2*m*L^2)}"
    )
    answer = (
        "Starting from the standard spectrum of the infinite well:\n"
        "@claim{kind=final_expression, expr=n^2*pi^2*hbar^2/(2*m*L^2), "
        "sym_dims=(n:1; m:M; L:L), target=M*L^2*T^-2}\n"
        f"Substituting n={n}, m={m}, L={L}:\n"
        f"@claim{{kind=numeric, value={energy!r}, "
        f"ref=n^2*pi^2*hbar^2/(2*m*L^2), where=(n:{n}; m:{m}; L:{L})}}\n"
        f"The level is strictly positive, as a bound state requires.\n"
        f"@claim{{kind=energy, value={energy!r}, n={n}, system=bound_state}}\n"
    )
    return SampleRecord(
        id=f"syn-box-{index:05d}",
        task_type="problem_solving",
        topic="bound states",
        difficulty=rng.choice(_DIFFICULTIES),
        question=question,
        answer=answer,
        reference_answer=reference,
    )


def _qubit_record(rng: random.Random, index: int) -> SampleRecord:
    theta = round(rng.uniform(0.2, 1.3), 4)
    c, s = math.cos(theta), math.sin(theta)
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    question = (
        f"A qubit is rotated by angle {theta}. Give the evolution operator, "
        "the resulting state, measurement probabilities, and the spectrum of "
        "the rotated observable."
    )
    answer = (
        "The rotation is orthogonal, hence unitary:\n"
        f"@claim{{kind=unitary_evolution, m=[[{c!r},{-s!r}],[{s!r},{c!r}]]}}\n"
        f"@claim{{kind=state_vector, m=[{c!r}, {s!r}]}}\n"
        f"@claim{{kind=probabilities, values=[{c * c!r},{s * s!r}]}}\n"
        "The rotated observable keeps the +-1 spectrum:\n"
        f"@claim{{kind=eigenvalues, values=[-1,1], "
        f"m=[[{c2!r},{s2!r}],[{s2!r},{-c2!r}]]}}\n"
    )
    reference = f"Rotation by {theta}: probabilities cos^2 and sin^2, spectrum -1, 1."
    return SampleRecord(
        id=f"syn-qubit-{index:05d}",
        task_type="problem_solving",
        topic="qubit dynamics",
        difficulty=rng.choice(_DIFFICULTIES),
        question=question,
        answer=answer,
        reference_answer=reference,
    )


def _density_record(rng: random.Random, index: int) -> SampleRecord:
    p = round(rng.uniform(0.15, 0.85), 4)
    theta = round(rng.uniform(0.1, 1.4), 4)
    c, s = math.cos(theta), math.sin(theta)
    r00 = c * c * p + s * s * (1 - p)
    r01 = c * s * (p - (1 - p))
    r11 = s * s * p + c * c * (1 - p)
    lo, hi = sorted((p, 1 - p))
    question = (
        f"A qubit ensemble mixes weights {p} and {1 - p} in a rotated basis. "
        "Write the density matrix, verify it, and give its spectrum."
    )
    answer = (
        "Rotating the diagonal mixture gives\n"
        f"@claim{{kind=density_matrix, m=[[{r00!r},{r01!r}],[{r01!r},{r11!r}]]}}\n"
        f"@claim{{kind=observable, m=[[{r00!r},{r01!r}],[{r01!r},{r11!r}]]}}\n"
        f"whose eigenvalues are the mixture weights:\n"
        f"@claim{{kind=eigenvalues, values=[{lo!r},{hi!r}], "
        f"m=[[{r00!r},{r01!r}],[{r01!r},{r11!r}]]}}\n"
    )
    reference = f"Spectrum of the mixed state: {lo!r} and {hi!r}."
    return SampleRecord(
        id=f"syn-density-{index:05d}",
        task_type="problem_solving",
        topic="mixed states",
        difficulty=rng.choice(_DIFFICULTIES),
        question=question,
        answer=answer,
        reference_answer=reference,
    )


def _concept_record(rng: random.Random, index: int) -> SampleRecord:
    task_type = rng.choice(("short_answer", "fill_blank", "true_false", "multiple_choice"))
    topic = rng.choice(
        ("measurement", "entanglement", "operators", "uncertainty", "spin")
    )
    statements = {
        "short_answer": (
            f"State the defining property of a projective {topic} operator.",
            f"A projector on the {topic} subspace is idempotent and Hermitian.",
        ),
        "fill_blank": (
            f"The generator of time evolution in {topic} problems is the ____.",
            "Hamiltonian",
        ),
        "true_false": (
            f"Every {topic} observable has a real spectrum. True or false?",
            "True",
        ),
        "multiple_choice": (
            f"Which option preserves the norm in {topic} dynamics? "
            "(a) unitary maps (b) projections (c) arbitrary linear maps",
            "(a)",
        ),
    }
    question, answer = statements[task_type]
    return SampleRecord(
        id=f"syn-concept-{index:05d}",
        task_type=task_type,
        topic=topic,
        difficulty=rng.choice(_DIFFICULTIES),
        question=question,
        answer=answer,
        reference_answer=answer,
    )


_TEMPLATES = (_ladder_record, _box_record, _qubit_record, _density_record)


def make_positive_record(seed: int, index: int, with_concepts: bool = False) -> SampleRecord:
    rng = random.Random(stable_seed(seed, "rec", index))
    templates = _TEMPLATES + ((_concept_record,) if with_concepts else ())
    return templates[index % len(templates)](rng, index)


def make_corpus(
    n: int, seed: int = 0, with_concepts: bool = False
) -> list[SampleRecord]:
    """n templated records, all structurally valid."""
    return [make_positive_record(seed, i, with_concepts) for i in range(n)]


_APPLICABLE_RULES = {
    "syn-ladder": ("commutator_break", "expr_break"),
    "syn-box": ("energy_zero", "numeric_off", "expr_break"),
    "syn-qubit": ("unitary_scale", "prob_break", "state_denorm", "spectrum_break"),
    "syn-density": ("density_shift", "spectrum_break"),
}


def corrupt_positive(record: SampleRecord, choice_seed: int) -> SampleRecord:
    """Deterministically corrupt one record with an applicable rule."""
    prefix = "-".join(record.id.split("-")[:2])
    rules = _APPLICABLE_RULES.get(prefix, tuple(CORRUPTION_RULES))
    rng = random.Random(stable_seed(choice_seed, record.id, "corrupt"))
    rule = rng.choice(rules)
    corrupted = corrupt_record(record, rule)
    if corrupted is None:  # fall back to any rule that applies
        for rule in CORRUPTION_RULES:
            corrupted = corrupt_record(record, rule)
            if corrupted is not None:
                break
    if corrupted is None:
        raise ValueError(f"no corruption rule applies to {record.id}")
    return corrupted


def make_labeled_corpus(
    n: int, seed: int = 0
) -> list[tuple[SampleRecord, int]]:
    """Half valid positives (label 1), half rule-corrupted negatives (0)."""
    labeled: list[tuple[SampleRecord, int]] = []
    for i in range(n):
        positive = make_positive_record(seed, i)
        if i % 2 == 0:
            labeled.append((positive, 1))
        else:
            labeled.append((corrupt_positive(positive, seed), 0))
    return labeled


def make_candidate_pool(
    seed: int, size: int, trial: int = 0
) -> tuple[str, str, list[tuple[str, float]]]:
    """(question, reference, candidates): answers with latent quality in [0,1].

    Quality drives both check outcomes (high: passing claims; mid: no
    claims; low: failing claims) and text coverage of the reference, so
    reward should correlate with it. Callers scoring the pool should pass
    the reference through, as a reranking harness would.
    """
    base = make_positive_record(stable_seed(seed, "pool", trial), trial * 7919)
    reference = base.reference_answer or base.answer
    # prose vocabulary excludes claim-block lines so partial text stays parsable
    prose_words = " ".join(
        line for line in reference.splitlines() if "@claim" not in line
    ).split()
    rng = random.Random(stable_seed(seed, "pool-q", trial))
    candidates: list[tuple[str, float]] = []
    for j in range(size):
        quality = rng.random()
        keep = max(1, int(round(quality * len(prose_words))))
        prose = " ".join(prose_words[:keep])
        if quality >= 0.7:
            answer = f"{prose}\n{base.answer}"
        elif quality >= 0.4:
            answer = prose if prose else "partial sketch"
        else:
            corrupted = corrupt_positive(base, stable_seed(seed, trial, j))
            answer = f"{prose}\n{corrupted.answer}"
        candidates.append((answer, quality))
    return base.question, reference, candidates
