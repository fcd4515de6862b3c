"""Complex-valued evaluation of expression ASTs.

All arithmetic is IEEE double-precision complex. ``sqrt`` uses the principal
branch, so no real-domain errors arise; ``hbar`` evaluates to 1.0 (natural
units) unless the caller binds it explicitly.
"""

from __future__ import annotations

import cmath
import math

from .ast import BinOp, Const, Expr, ExprError, Func, Neg, Num, Sym

DEFAULT_HBAR = 1.0


class UnboundSymbol(ExprError):
    def __init__(self, name: str):
        super().__init__(f"unbound symbol {name!r}")
        self.name = name


class DivisionByZero(ExprError):
    pass


class DomainError(ExprError):
    pass


_FUNC_IMPL = {
    "exp": cmath.exp,
    "sqrt": cmath.sqrt,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "conj": lambda z: z.conjugate(),
    "abs": lambda z: complex(abs(z)),
}


def eval_expr(expr: Expr, bindings: dict[str, complex] | None = None) -> complex:
    """Evaluate ``expr`` with every free symbol bound in ``bindings``."""
    bindings = bindings or {}

    def ev(node: Expr) -> complex:
        if isinstance(node, Num):
            return complex(node.value)
        if isinstance(node, Const):
            if node.name == "pi":
                return complex(math.pi)
            if node.name == "i":
                return 1j
            return complex(bindings.get("hbar", DEFAULT_HBAR))
        if isinstance(node, Sym):
            if node.name not in bindings:
                raise UnboundSymbol(node.name)
            return complex(bindings[node.name])
        if isinstance(node, Neg):
            return -ev(node.operand)
        if isinstance(node, Func):
            value = ev(node.arg)
            try:
                return _FUNC_IMPL[node.name](value)
            except (ValueError, OverflowError) as exc:
                raise DomainError(f"{node.name}({value!r}): {exc}") from exc
        if isinstance(node, BinOp):
            left = ev(node.left)
            right = ev(node.right)
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            if node.op == "/":
                if right == 0:
                    raise DivisionByZero(f"division by zero in {node.op!r}")
                return left / right
            # power: principal branch via cmath
            if left == 0 and (right.real < 0 or right.imag != 0):
                raise DivisionByZero("zero base raised to negative or complex power")
            try:
                return left**right
            except (ValueError, OverflowError, ZeroDivisionError) as exc:
                raise DomainError(f"power {left!r}^{right!r}: {exc}") from exc
        raise TypeError(f"not an expression node: {node!r}")

    result = ev(expr)
    if not (math.isfinite(result.real) and math.isfinite(result.imag)):
        raise DomainError(f"non-finite result {result!r}")
    return result
