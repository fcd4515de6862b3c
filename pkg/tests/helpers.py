"""Shared generators for the test suite (seeded, deterministic)."""

import random

from qreward.expr import BinOp, Const, Func, Neg, Num, Sym

SYMBOL_POOL = ("x", "y", "t", "omega", "n", "m", "L", "E_0", "psi")


def random_ast(rng: random.Random, depth: int = 0):
    """Canonical random AST: non-negative literals, bounded depth."""
    if depth >= 4 or rng.random() < 0.3:
        kind = rng.choice(("num", "sym", "const"))
        if kind == "num":
            return Num(float(rng.choice((0, 1, 2, 3, 0.5, 1.25, 2e-3, 7))))
        if kind == "sym":
            return Sym(rng.choice(SYMBOL_POOL))
        return Const(rng.choice(("pi", "hbar", "i")))
    kind = rng.choice(("bin", "bin", "bin", "neg", "func"))
    if kind == "neg":
        return Neg(random_ast(rng, depth + 1))
    if kind == "func":
        return Func(
            rng.choice(("exp", "sqrt", "sin", "cos", "conj", "abs")),
            random_ast(rng, depth + 1),
        )
    return BinOp(
        rng.choice("+-*/^"),
        random_ast(rng, depth + 1),
        random_ast(rng, depth + 1),
    )
