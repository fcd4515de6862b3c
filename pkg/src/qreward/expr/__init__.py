"""Expression language and complex-matrix kernel for deterministic checks."""

from .ast import (
    BinOp,
    Const,
    Expr,
    ExprError,
    Func,
    Neg,
    Num,
    Sym,
    free_symbols,
    node_count,
    unparse,
)
from .dimensions import (
    BASE_UNITS,
    DIMENSIONLESS,
    DimensionMismatch,
    DimensionVector,
    ENERGY,
    HBAR_DIMENSION,
    NonRationalExponent,
    infer_dimension,
    parse_dimension,
)
from .eigen import NoConvergence, NotHermitian, hermitian_eig, hermitian_eigenvalues
from .evaluate import (
    DEFAULT_HBAR,
    DivisionByZero,
    DomainError,
    UnboundSymbol,
    eval_expr,
)
from .matrix import (
    ComplexMatrix,
    ShapeMismatch,
    fock_lowering,
    fock_raising,
    is_vector,
    matrix_algebra,
    vector_norm_squared,
)
from .parse import ExprSyntaxError, UnknownFunction, parse_expr
from .probe import equiv_probe, sample_bindings

__all__ = [
    "BASE_UNITS",
    "BinOp",
    "ComplexMatrix",
    "Const",
    "DEFAULT_HBAR",
    "DIMENSIONLESS",
    "DimensionMismatch",
    "DimensionVector",
    "DivisionByZero",
    "DomainError",
    "ENERGY",
    "Expr",
    "ExprError",
    "ExprSyntaxError",
    "Func",
    "HBAR_DIMENSION",
    "Neg",
    "NoConvergence",
    "NonRationalExponent",
    "NotHermitian",
    "Num",
    "ShapeMismatch",
    "Sym",
    "UnboundSymbol",
    "UnknownFunction",
    "equiv_probe",
    "eval_expr",
    "fock_lowering",
    "fock_raising",
    "free_symbols",
    "hermitian_eig",
    "hermitian_eigenvalues",
    "infer_dimension",
    "is_vector",
    "matrix_algebra",
    "node_count",
    "parse_dimension",
    "parse_expr",
    "sample_bindings",
    "unparse",
    "vector_norm_squared",
]
