"""Randomized numeric probing for symbolic-equivalence decisions.

A full CAS is out of scope; equality is decided by evaluating both sides at
seeded random complex points. Sound up to measure-zero adversaries, which the
check fixtures avoid by construction.
"""

from __future__ import annotations

import cmath
import random

from .ast import Expr, free_symbols
from .evaluate import eval_expr
from .parse import parse_expr

DEFAULT_TRIALS = 16
DEFAULT_TOL = 1e-9

# probe moduli stay in [MIN_MODULUS, MAX_MODULUS]; singular symbols are
# additionally kept away from zero by MIN_SINGULAR_DISTANCE
MIN_MODULUS = 0.5
MAX_MODULUS = 2.0
MIN_SINGULAR_DISTANCE = 1e-3
_MAX_RETRIES = 10


def sample_bindings(
    symbols: frozenset[str] | set[str],
    rng: random.Random,
    singular: frozenset[str] | set[str] = frozenset(),
) -> dict[str, complex]:
    """Draw one complex probe point; deterministic given the rng state."""
    bindings: dict[str, complex] = {}
    for name in sorted(symbols):
        while True:
            modulus = rng.uniform(MIN_MODULUS, MAX_MODULUS)
            phase = rng.uniform(0.0, 2.0 * cmath.pi)
            value = modulus * cmath.exp(1j * phase)
            if name in singular and abs(value) < MIN_SINGULAR_DISTANCE:
                continue
            bindings[name] = value
            break
    return bindings


def equiv_probe(
    a: Expr | str,
    b: Expr | str,
    trials: int = DEFAULT_TRIALS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    singular: frozenset[str] | set[str] = frozenset(),
) -> bool:
    """True iff ``a`` and ``b`` agree at every probe point.

    Agreement at a point means |a - b| <= tol * (1 + max(|a|, |b|)).
    Evaluation failures retry a fresh probe point up to 10 times, then
    propagate.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if isinstance(a, str):
        a = parse_expr(a)
    if isinstance(b, str):
        b = parse_expr(b)
    symbols = free_symbols(a) | free_symbols(b)
    rng = random.Random(seed)
    for _ in range(trials):
        for attempt in range(_MAX_RETRIES + 1):
            bindings = sample_bindings(symbols, rng, singular)
            try:
                va = eval_expr(a, bindings)
                vb = eval_expr(b, bindings)
            except Exception:
                if attempt == _MAX_RETRIES:
                    raise
                continue
            if abs(va - vb) > tol * (1.0 + max(abs(va), abs(vb))):
                return False
            break
    return True
