"""Structured-claim extraction from answer text.

Answers embed machine-checkable assertions as ``@claim{kind=..., ...}``
blocks (grammar in docs/claims.md). Extraction is strict: any malformed
block marks the whole bundle unparsable, which downgrades every check to
"execution unavailable" so only well-formed derivations can earn positive
verification. The extractor is pluggable (see ``ClaimExtractor``) so a
model-backed semantic parser can replace the annotation grammar later.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Protocol

from ..expr import (
    ComplexMatrix,
    DimensionVector,
    Expr,
    eval_expr,
    parse_dimension,
    parse_expr,
    unparse,
)

CLAIM_KINDS = (
    "final_expression",
    "numeric",
    "unitary_evolution",
    "observable",
    "density_matrix",
    "state_vector",
    "commutator",
    "probabilities",
    "energy",
    "eigenvalues",
)

MATRIX_KINDS = ("unitary_evolution", "observable", "density_matrix", "state_vector")

DOMAINS = (
    "positive_integer",
    "nonnegative_integer",
    "integer",
    "positive",
    "nonnegative",
)

_CLAIM_OPEN = re.compile(r"@claim\{")


class ClaimParseError(ValueError):
    pass


@dataclass(frozen=True)
class Claim:
    """Base claim; ``span`` is the (start, end) byte range in the answer."""

    span: tuple[int, int]


@dataclass(frozen=True)
class FinalExpressionClaim(Claim):
    expr: Expr
    reference: Expr | None = None
    symbol_dims: dict[str, DimensionVector] | None = None
    target_dim: DimensionVector | None = None
    where: dict[str, complex] | None = None


@dataclass(frozen=True)
class NumericClaim(Claim):
    value: Expr
    reference: Expr | None = None
    units: DimensionVector | None = None
    where: dict[str, complex] | None = None
    domain: str | None = None


@dataclass(frozen=True)
class MatrixClaim(Claim):
    kind: str  # one of MATRIX_KINDS
    matrix: ComplexMatrix


@dataclass(frozen=True)
class CommutatorClaim(Claim):
    op_a: str
    op_b: str
    result: str
    where: dict[str, complex] | None = None


@dataclass(frozen=True)
class ProbabilityClaim(Claim):
    values: tuple[float, ...]


@dataclass(frozen=True)
class EnergyClaim(Claim):
    energy: Expr
    quantum_number: int | None = None
    system: str = "bound_state"  # bound_state | free
    where: dict[str, complex] | None = None
    n_domain: str | None = None


@dataclass(frozen=True)
class EigenvalueClaim(Claim):
    values: tuple[float, ...]
    matrix: ComplexMatrix | None = None


@dataclass
class ClaimBundle:
    claims: list[Claim] = field(default_factory=list)
    unparsable: bool = False
    problems: list[str] = field(default_factory=list)

    def of_type(self, claim_type) -> list:
        return [c for c in self.claims if isinstance(c, claim_type)]

    def matrices(self, kind: str) -> list[MatrixClaim]:
        return [c for c in self.of_type(MatrixClaim) if c.kind == kind]

    def __len__(self) -> int:
        return len(self.claims)


class ClaimExtractor(Protocol):
    def __call__(self, answer: str) -> ClaimBundle: ...


def split_top_level(text: str, sep: str) -> list[str]:
    """Split on ``sep`` outside any (), [] nesting."""
    parts: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ClaimParseError(f"unbalanced brackets in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ClaimParseError(f"unbalanced brackets in {text!r}")
    parts.append("".join(current))
    return parts


def _eval_const(text: str) -> complex:
    """Evaluate an expression of constants only (entries, list items)."""
    return eval_expr(parse_expr(text), {})


def _parse_real(text: str) -> float:
    value = _eval_const(text)
    if abs(value.imag) > 1e-12:
        raise ClaimParseError(f"expected a real number, got {text!r}")
    return float(value.real)


def parse_matrix_literal(text: str) -> ComplexMatrix:
    """``[[a,b],[c,d]]`` with expression entries; a flat list is a column."""
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ClaimParseError(f"matrix literal must be bracketed: {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        raise ClaimParseError("empty matrix literal")
    if not inner.startswith("["):
        # flat list -> column vector
        values = [_eval_const(e) for e in split_top_level(inner, ",")]
        return ComplexMatrix([[v] for v in values])
    rows = []
    for row_text in split_top_level(inner, ","):
        row_text = row_text.strip()
        if not (row_text.startswith("[") and row_text.endswith("]")):
            raise ClaimParseError(f"bad matrix row {row_text!r}")
        rows.append([_eval_const(e) for e in split_top_level(row_text[1:-1], ",")])
    if len({len(r) for r in rows}) != 1:
        raise ClaimParseError("ragged matrix rows")
    return ComplexMatrix(rows)


def parse_real_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ClaimParseError(f"list literal must be bracketed: {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return ()
    return tuple(_parse_real(e) for e in split_top_level(inner, ","))


def parse_bindings(text: str) -> dict[str, complex]:
    """``(n:0; m:1; L:2.5)`` -> symbol bindings."""
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ClaimParseError(f"bindings must be parenthesized: {text!r}")
    bindings: dict[str, complex] = {}
    for item in text[1:-1].split(";"):
        item = item.strip()
        if not item:
            continue
        name, _, value = item.partition(":")
        if not value:
            raise ClaimParseError(f"bad binding {item!r}")
        bindings[name.strip()] = _eval_const(value)
    return bindings


def parse_symbol_dims(text: str) -> dict[str, DimensionVector]:
    """``(n:1; m:M; L:L)`` -> per-symbol dimensions."""
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ClaimParseError(f"dimension map must be parenthesized: {text!r}")
    dims: dict[str, DimensionVector] = {}
    for item in text[1:-1].split(";"):
        item = item.strip()
        if not item:
            continue
        name, _, value = item.partition(":")
        if not value:
            raise ClaimParseError(f"bad dimension entry {item!r}")
        try:
            dims[name.strip()] = parse_dimension(value.strip())
        except ValueError as exc:
            raise ClaimParseError(str(exc)) from exc
    return dims


def _parse_domain(text: str) -> str:
    text = text.strip()
    if text not in DOMAINS:
        raise ClaimParseError(f"unknown domain {text!r}")
    return text


def _parse_fields(body: str) -> dict[str, str]:
    fields: dict[str, str] = {}
    for item in split_top_level(body, ","):
        item = item.strip()
        if not item:
            continue
        name, eq, value = item.partition("=")
        if not eq:
            raise ClaimParseError(f"field without '=': {item!r}")
        name = name.strip()
        if name in fields:
            raise ClaimParseError(f"duplicate field {name!r}")
        fields[name] = value.strip()
    return fields


def _require(fields: dict[str, str], name: str) -> str:
    if name not in fields:
        raise ClaimParseError(f"missing required field {name!r}")
    return fields[name]


def _reject_unknown(fields: dict[str, str], allowed: set[str]) -> None:
    unknown = set(fields) - allowed - {"kind"}
    if unknown:
        raise ClaimParseError(f"unknown fields {sorted(unknown)}")


def _build_claim(fields: dict[str, str], span: tuple[int, int]) -> Claim:
    kind = _require(fields, "kind")
    if kind not in CLAIM_KINDS:
        raise ClaimParseError(f"unknown claim kind {kind!r}")
    if kind == "final_expression":
        _reject_unknown(fields, {"expr", "ref", "sym_dims", "target", "where"})
        return FinalExpressionClaim(
            span=span,
            expr=parse_expr(_require(fields, "expr")),
            reference=parse_expr(fields["ref"]) if "ref" in fields else None,
            symbol_dims=(
                parse_symbol_dims(fields["sym_dims"]) if "sym_dims" in fields else None
            ),
            target_dim=(
                parse_dimension(fields["target"]) if "target" in fields else None
            ),
            where=parse_bindings(fields["where"]) if "where" in fields else None,
        )
    if kind == "numeric":
        _reject_unknown(fields, {"value", "ref", "units", "where", "domain"})
        return NumericClaim(
            span=span,
            value=parse_expr(_require(fields, "value")),
            reference=parse_expr(fields["ref"]) if "ref" in fields else None,
            units=parse_dimension(fields["units"]) if "units" in fields else None,
            where=parse_bindings(fields["where"]) if "where" in fields else None,
            domain=_parse_domain(fields["domain"]) if "domain" in fields else None,
        )
    if kind in MATRIX_KINDS:
        _reject_unknown(fields, {"m"})
        return MatrixClaim(
            span=span, kind=kind, matrix=parse_matrix_literal(_require(fields, "m"))
        )
    if kind == "commutator":
        _reject_unknown(fields, {"a", "b", "result", "where"})
        return CommutatorClaim(
            span=span,
            op_a=_require(fields, "a"),
            op_b=_require(fields, "b"),
            result=_require(fields, "result"),
            where=parse_bindings(fields["where"]) if "where" in fields else None,
        )
    if kind == "probabilities":
        _reject_unknown(fields, {"values"})
        return ProbabilityClaim(span=span, values=parse_real_list(_require(fields, "values")))
    if kind == "energy":
        _reject_unknown(fields, {"value", "expr", "n", "system", "where", "n_domain"})
        if "value" in fields and "expr" in fields:
            raise ClaimParseError("energy claim takes value or expr, not both")
        energy_text = fields.get("value") or fields.get("expr")
        if energy_text is None:
            raise ClaimParseError("energy claim requires value or expr")
        system = fields.get("system", "bound_state")
        if system not in ("bound_state", "free"):
            raise ClaimParseError(f"unknown system {system!r}")
        quantum_number = None
        if "n" in fields:
            n_value = _parse_real(fields["n"])
            if abs(n_value - round(n_value)) > 1e-9:
                raise ClaimParseError(f"quantum number must be an integer: {fields['n']!r}")
            quantum_number = int(round(n_value))
        return EnergyClaim(
            span=span,
            energy=parse_expr(energy_text),
            quantum_number=quantum_number,
            system=system,
            where=parse_bindings(fields["where"]) if "where" in fields else None,
            n_domain=_parse_domain(fields["n_domain"]) if "n_domain" in fields else None,
        )
    # eigenvalues
    _reject_unknown(fields, {"m", "values"})
    return EigenvalueClaim(
        span=span,
        values=parse_real_list(_require(fields, "values")),
        matrix=parse_matrix_literal(fields["m"]) if "m" in fields else None,
    )


def _format_real(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def format_complex_entry(value: complex) -> str:
    """Render a complex number as re-parsable expression text."""
    re_part, im_part = value.real, value.imag
    if im_part == 0:
        return _format_real(re_part)
    im_text = f"{_format_real(abs(im_part))}*I"
    if re_part == 0:
        return im_text if im_part > 0 else f"-{im_text}"
    sign = "+" if im_part > 0 else "-"
    return f"{_format_real(re_part)}{sign}{im_text}"


def render_matrix_literal(m: ComplexMatrix) -> str:
    rows = []
    for r in range(m.rows):
        rows.append(
            "[" + ",".join(format_complex_entry(complex(v)) for v in m.array[r]) + "]"
        )
    return "[" + ",".join(rows) + "]"


def _render_bindings(bindings: dict[str, complex]) -> str:
    items = "; ".join(
        f"{name}:{format_complex_entry(value)}" for name, value in bindings.items()
    )
    return f"({items})"


def _render_symbol_dims(dims: dict[str, DimensionVector]) -> str:
    return "(" + "; ".join(f"{name}:{dim}" for name, dim in dims.items()) + ")"


def render_claim(claim: Claim) -> str:
    """Render a claim back to block text; parses back to an equal claim."""
    if isinstance(claim, FinalExpressionClaim):
        parts = ["kind=final_expression", f"expr={unparse(claim.expr)}"]
        if claim.reference is not None:
            parts.append(f"ref={unparse(claim.reference)}")
        if claim.symbol_dims is not None:
            parts.append(f"sym_dims={_render_symbol_dims(claim.symbol_dims)}")
        if claim.target_dim is not None:
            parts.append(f"target={claim.target_dim}")
        if claim.where is not None:
            parts.append(f"where={_render_bindings(claim.where)}")
    elif isinstance(claim, NumericClaim):
        parts = ["kind=numeric", f"value={unparse(claim.value)}"]
        if claim.reference is not None:
            parts.append(f"ref={unparse(claim.reference)}")
        if claim.units is not None:
            parts.append(f"units={claim.units}")
        if claim.where is not None:
            parts.append(f"where={_render_bindings(claim.where)}")
        if claim.domain is not None:
            parts.append(f"domain={claim.domain}")
    elif isinstance(claim, MatrixClaim):
        parts = [f"kind={claim.kind}", f"m={render_matrix_literal(claim.matrix)}"]
    elif isinstance(claim, CommutatorClaim):
        parts = [
            "kind=commutator",
            f"a={claim.op_a}",
            f"b={claim.op_b}",
            f"result={claim.result}",
        ]
        if claim.where is not None:
            parts.append(f"where={_render_bindings(claim.where)}")
    elif isinstance(claim, ProbabilityClaim):
        values = ",".join(_format_real(v) for v in claim.values)
        parts = ["kind=probabilities", f"values=[{values}]"]
    elif isinstance(claim, EnergyClaim):
        parts = ["kind=energy", f"value={unparse(claim.energy)}"]
        if claim.quantum_number is not None:
            parts.append(f"n={claim.quantum_number}")
        parts.append(f"system={claim.system}")
        if claim.where is not None:
            parts.append(f"where={_render_bindings(claim.where)}")
        if claim.n_domain is not None:
            parts.append(f"n_domain={claim.n_domain}")
    elif isinstance(claim, EigenvalueClaim):
        values = ",".join(_format_real(v) for v in claim.values)
        parts = ["kind=eigenvalues", f"values=[{values}]"]
        if claim.matrix is not None:
            parts.append(f"m={render_matrix_literal(claim.matrix)}")
    else:
        raise TypeError(f"not a claim: {claim!r}")
    return "@claim{" + ", ".join(parts) + "}"


def replace_claims(answer: str, replacements: dict[tuple[int, int], Claim]) -> str:
    """Splice rendered replacement claims into ``answer`` by original span."""
    result = []
    cursor = 0
    for span in sorted(replacements):
        start, end = span
        result.append(answer[cursor:start])
        result.append(render_claim(replacements[span]))
        cursor = end
    result.append(answer[cursor:])
    return "".join(result)


def extract_claims(answer: str) -> ClaimBundle:
    """Parse every ``@claim{...}`` block in ``answer``.

    Zero blocks yields an empty bundle. Any malformed block marks the bundle
    unparsable (a state, not an exception).
    """
    bundle = ClaimBundle()
    for match in _CLAIM_OPEN.finditer(answer):
        start = match.start()
        close = answer.find("}", match.end())
        if close < 0:
            bundle.unparsable = True
            bundle.problems.append(f"unclosed claim block at offset {start}")
            continue
        body = answer[match.end() : close]
        span = (start, close + 1)
        try:
            bundle.claims.append(_build_claim(_parse_fields(body), span))
        except Exception as exc:
            bundle.unparsable = True
            bundle.problems.append(f"bad claim block at offset {start}: {exc}")
    return bundle
