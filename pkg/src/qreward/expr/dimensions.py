"""Dimensional analysis over the 7 SI base units with exact rational exponents.

Base-unit order: M (mass), L (length), T (time), I (current), K (temperature),
N (amount), J (luminosity). Dimension strings multiply unit factors, e.g.
``M*L^2*T^-2`` for energy; ``1`` denotes dimensionless.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .ast import BinOp, Const, Expr, ExprError, Func, Neg, Num, Sym, unparse
from .evaluate import UnboundSymbol, eval_expr

BASE_UNITS = ("M", "L", "T", "I", "K", "N", "J")

# largest denominator accepted when snapping a float exponent to a rational
_MAX_DENOMINATOR = 1000
_RATIONAL_ATOL = 1e-9


class DimensionMismatch(ExprError):
    """Operands or arguments carry incompatible dimensions.

    ``node`` is the offending AST node; the message embeds its source form.
    """

    def __init__(self, message: str, node: Expr):
        super().__init__(f"{message} in `{unparse(node)}`")
        self.node = node


class NonRationalExponent(ExprError):
    def __init__(self, message: str, node: Expr):
        super().__init__(f"{message} in `{unparse(node)}`")
        self.node = node


@dataclass(frozen=True)
class DimensionVector:
    exponents: tuple[Fraction, ...]  # length 7, BASE_UNITS order

    def __post_init__(self):
        if len(self.exponents) != len(BASE_UNITS):
            raise ValueError("dimension vector must have 7 exponents")

    @staticmethod
    def dimensionless() -> "DimensionVector":
        return DimensionVector(tuple(Fraction(0) for _ in BASE_UNITS))

    @staticmethod
    def base(unit: str) -> "DimensionVector":
        idx = BASE_UNITS.index(unit)
        return DimensionVector(
            tuple(Fraction(1 if i == idx else 0) for i in range(len(BASE_UNITS)))
        )

    @property
    def is_dimensionless(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def __add__(self, other: "DimensionVector") -> "DimensionVector":
        return DimensionVector(
            tuple(a + b for a, b in zip(self.exponents, other.exponents))
        )

    def __sub__(self, other: "DimensionVector") -> "DimensionVector":
        return DimensionVector(
            tuple(a - b for a, b in zip(self.exponents, other.exponents))
        )

    def scale(self, factor: Fraction) -> "DimensionVector":
        return DimensionVector(tuple(e * factor for e in self.exponents))

    def __str__(self) -> str:
        parts = []
        for unit, exponent in zip(BASE_UNITS, self.exponents):
            if exponent == 0:
                continue
            if exponent == 1:
                parts.append(unit)
            elif exponent.denominator == 1:
                parts.append(f"{unit}^{exponent.numerator}")
            else:
                parts.append(f"{unit}^({exponent.numerator}/{exponent.denominator})")
        return "*".join(parts) if parts else "1"


_DIM_FACTOR_RE = re.compile(
    r"^(?P<unit>[MLTIKNJ])(?:\^(?P<exp>-?\d+|\(-?\d+/\d+\)))?$"
)

DIMENSIONLESS = DimensionVector.dimensionless()
ENERGY = DimensionVector.base("M") + DimensionVector.base("L").scale(Fraction(2)) - (
    DimensionVector.base("T").scale(Fraction(2))
)
HBAR_DIMENSION = DimensionVector.base("M") + DimensionVector.base("L").scale(
    Fraction(2)
) - DimensionVector.base("T")


def parse_dimension(text: str) -> DimensionVector:
    """Parse a dimension string like ``M*L^2*T^-2`` (``1`` = dimensionless)."""
    text = text.strip()
    if text in ("1", ""):
        return DimensionVector.dimensionless()
    result = DimensionVector.dimensionless()
    for factor in re.split(r"[*\s]+", text):
        if not factor:
            continue
        m = _DIM_FACTOR_RE.match(factor)
        if m is None:
            raise ValueError(f"bad dimension factor {factor!r}")
        exp_text = m.group("exp")
        if exp_text is None:
            exponent = Fraction(1)
        else:
            exponent = Fraction(exp_text.strip("()"))
        result = result + DimensionVector.base(m.group("unit")).scale(exponent)
    return result


def _const_rational(node: Expr) -> Fraction:
    """Evaluate a symbol-free exponent to an exact small rational."""
    try:
        value = eval_expr(node, {})
    except UnboundSymbol as exc:
        raise NonRationalExponent(
            f"exponent contains free symbol {exc.name!r}", node
        ) from exc
    if abs(value.imag) > 1e-12:
        raise NonRationalExponent("exponent is not real", node)
    snapped = Fraction(value.real).limit_denominator(_MAX_DENOMINATOR)
    if abs(float(snapped) - value.real) > _RATIONAL_ATOL:
        raise NonRationalExponent(
            f"exponent {value.real!r} is not a small rational", node
        )
    return snapped


def infer_dimension(
    expr: Expr, symbol_dims: dict[str, DimensionVector] | None = None
) -> DimensionVector:
    """Infer the dimension of ``expr`` given per-symbol declarations.

    +/- require identical operand dimensions; ^ requires a dimensionless
    exponent that is a rational constant whenever the base is dimensional;
    exp/sin/cos require dimensionless arguments; sqrt halves exponents;
    conj/abs/negation preserve dimension.
    """
    symbol_dims = symbol_dims or {}

    def infer(node: Expr) -> DimensionVector:
        if isinstance(node, Num):
            return DIMENSIONLESS
        if isinstance(node, Const):
            return HBAR_DIMENSION if node.name == "hbar" else DIMENSIONLESS
        if isinstance(node, Sym):
            if node.name not in symbol_dims:
                raise UnboundSymbol(node.name)
            return symbol_dims[node.name]
        if isinstance(node, Neg):
            return infer(node.operand)
        if isinstance(node, Func):
            arg_dim = infer(node.arg)
            if node.name in ("conj", "abs"):
                return arg_dim
            if node.name == "sqrt":
                return arg_dim.scale(Fraction(1, 2))
            if not arg_dim.is_dimensionless:
                raise DimensionMismatch(
                    f"{node.name} requires a dimensionless argument, got {arg_dim}",
                    node,
                )
            return DIMENSIONLESS
        if isinstance(node, BinOp):
            if node.op in "+-":
                left = infer(node.left)
                right = infer(node.right)
                if left != right:
                    raise DimensionMismatch(
                        f"cannot {'add' if node.op == '+' else 'subtract'} "
                        f"{left} and {right}",
                        node,
                    )
                return left
            if node.op == "*":
                return infer(node.left) + infer(node.right)
            if node.op == "/":
                return infer(node.left) - infer(node.right)
            # power
            exp_dim = infer(node.right)
            if not exp_dim.is_dimensionless:
                raise DimensionMismatch(
                    f"exponent must be dimensionless, got {exp_dim}", node.right
                )
            base_dim = infer(node.left)
            if base_dim.is_dimensionless:
                return DIMENSIONLESS
            return base_dim.scale(_const_rational(node.right))
        raise TypeError(f"not an expression node: {node!r}")

    return infer(expr)
