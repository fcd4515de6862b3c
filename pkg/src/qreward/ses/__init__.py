"""Scientific Execution Suite: claim extraction, 12 atomic checks, trinary
verification vector."""

from .checks import (
    CHECK_DIMENSION,
    CHECK_IDS,
    CHECK_NAMES,
    CheckConfig,
    CheckReport,
    run_check,
    verify,
)
from .claims import (
    CLAIM_KINDS,
    Claim,
    ClaimBundle,
    ClaimParseError,
    CommutatorClaim,
    EigenvalueClaim,
    EnergyClaim,
    FinalExpressionClaim,
    MATRIX_KINDS,
    MatrixClaim,
    NumericClaim,
    ProbabilityClaim,
    extract_claims,
    parse_matrix_literal,
    render_claim,
    replace_claims,
)
from .verify import (
    ALL_DIMENSIONS,
    EvalDimension,
    FAIL,
    PASS,
    SEMANTIC_DIMENSIONS,
    UNAVAILABLE,
    VERIFIABLE_DIMENSIONS,
    VerificationVector,
    combine_indicators,
)

__all__ = [
    "ALL_DIMENSIONS",
    "CHECK_DIMENSION",
    "CHECK_IDS",
    "CHECK_NAMES",
    "CLAIM_KINDS",
    "CheckConfig",
    "CheckReport",
    "Claim",
    "ClaimBundle",
    "ClaimParseError",
    "CommutatorClaim",
    "EigenvalueClaim",
    "EnergyClaim",
    "EvalDimension",
    "FAIL",
    "FinalExpressionClaim",
    "MATRIX_KINDS",
    "MatrixClaim",
    "NumericClaim",
    "PASS",
    "ProbabilityClaim",
    "SEMANTIC_DIMENSIONS",
    "UNAVAILABLE",
    "VERIFIABLE_DIMENSIONS",
    "VerificationVector",
    "combine_indicators",
    "extract_claims",
    "parse_matrix_literal",
    "render_claim",
    "replace_claims",
    "run_check",
    "verify",
]
