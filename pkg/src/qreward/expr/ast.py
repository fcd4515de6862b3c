"""AST for the scalar expression language used by the deterministic checks.

Canonical form notes:
 - numeric literals are non-negative finite floats; negative values are
   represented as ``Neg(Num(...))`` so printing and re-parsing is stable
 - ``^`` is right-associative and binds tighter than unary minus,
   which binds tighter than ``*``/``/``, which bind tighter than ``+``/``-``
"""

from __future__ import annotations

import math
from dataclasses import dataclass

FUNCTIONS = ("exp", "sqrt", "sin", "cos", "conj", "abs")
CONSTANTS = ("pi", "hbar", "i")

# printable token for each constant
_CONST_TOKEN = {"pi": "pi", "hbar": "hbar", "i": "I"}


class ExprError(ValueError):
    """Base class for expression-language errors."""


@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ExprError(f"non-finite literal {self.value!r}")


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Const:
    name: str  # one of CONSTANTS

    def __post_init__(self):
        if self.name not in CONSTANTS:
            raise ExprError(f"unknown constant {self.name!r}")


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in "+-*/^":
            raise ExprError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Func:
    name: str  # one of FUNCTIONS
    arg: "Expr"

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ExprError(f"unknown function {self.name!r}")


Expr = Num | Sym | Const | Neg | BinOp | Func

# precedence levels used by both the parser and the printer
_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        if node.op in "+-":
            return _PREC_ADD
        if node.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(node, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def _format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def unparse(node: Expr) -> str:
    """Render an AST back to source text; parse(unparse(x)) == x."""
    if isinstance(node, Num):
        return _format_number(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Const):
        return _CONST_TOKEN[node.name]
    if isinstance(node, Neg):
        inner = unparse(node.operand)
        if _prec(node.operand) < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Func):
        return f"{node.name}({unparse(node.arg)})"
    if isinstance(node, BinOp):
        prec = _prec(node)
        left = unparse(node.left)
        right = unparse(node.right)
        if node.op == "^":
            # right-associative: parenthesize an equal-precedence left child;
            # a Neg on the right re-parses identically (signed exponent x^-y)
            if _prec(node.left) <= prec:
                left = f"({left})"
            if isinstance(node.right, BinOp) and _prec(node.right) < prec:
                right = f"({right})"
        else:
            # left-associative: equal precedence on the right needs parens;
            # Neg (prec 3) on the right stays bare, e.g. a*-b
            if _prec(node.left) < prec:
                left = f"({left})"
            if _prec(node.right) <= prec:
                right = f"({right})"
        return f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


def free_symbols(node: Expr) -> frozenset[str]:
    if isinstance(node, Sym):
        return frozenset((node.name,))
    if isinstance(node, Neg):
        return free_symbols(node.operand)
    if isinstance(node, Func):
        return free_symbols(node.arg)
    if isinstance(node, BinOp):
        return free_symbols(node.left) | free_symbols(node.right)
    return frozenset()


def node_count(node: Expr) -> int:
    if isinstance(node, Neg):
        return 1 + node_count(node.operand)
    if isinstance(node, Func):
        return 1 + node_count(node.arg)
    if isinstance(node, BinOp):
        return 1 + node_count(node.left) + node_count(node.right)
    return 1
