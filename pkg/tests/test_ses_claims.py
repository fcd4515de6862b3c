import pytest

from qreward.expr import ComplexMatrix, Num, parse_expr
from qreward.ses import (
    ClaimBundle,
    CommutatorClaim,
    EigenvalueClaim,
    EnergyClaim,
    FinalExpressionClaim,
    MatrixClaim,
    NumericClaim,
    ProbabilityClaim,
    extract_claims,
    render_claim,
    replace_claims,
)
from qreward.ses.claims import parse_bindings, parse_matrix_literal, split_top_level


class TestExtraction:
    def test_no_blocks_empty_bundle(self):
        bundle = extract_claims("plain prose, no machine-checkable content")
        assert len(bundle) == 0
        assert bundle.unparsable is False

    def test_density_matrix_block(self):
        bundle = extract_claims(
            "rho is @claim{kind=density_matrix, m=[[0.6,0.5],[0.5,0.4]]} here"
        )
        assert len(bundle) == 1
        claim = bundle.claims[0]
        assert isinstance(claim, MatrixClaim) and claim.kind == "density_matrix"
        assert claim.matrix == ComplexMatrix([[0.6, 0.5], [0.5, 0.4]])

    def test_span_covers_block(self):
        text = "before @claim{kind=probabilities, values=[0.5,0.5]} after"
        bundle = extract_claims(text)
        start, end = bundle.claims[0].span
        assert text[start:end] == "@claim{kind=probabilities, values=[0.5,0.5]}"

    def test_multiple_blocks(self):
        text = (
            "@claim{kind=numeric, value=1, ref=1}\n"
            "@claim{kind=energy, value=2.5, n=1, system=bound_state}"
        )
        bundle = extract_claims(text)
        assert [type(c) for c in bundle.claims] == [NumericClaim, EnergyClaim]

    def test_commutator_fixture_block(self):
        bundle = extract_claims(
            "@claim{kind=commutator, a=exp(-I*w*t)*lower, b=exp(I*w*t)*raise, result=1}"
        )
        (claim,) = bundle.claims
        assert isinstance(claim, CommutatorClaim)
        assert claim.op_a == "exp(-I*w*t)*lower"
        assert claim.result == "1"

    def test_complex_matrix_entries(self):
        bundle = extract_claims(
            "@claim{kind=unitary_evolution, m=[[1/sqrt(2),1/sqrt(2)],"
            "[I/sqrt(2),-I/sqrt(2)]]}"
        )
        (claim,) = bundle.claims
        assert claim.matrix.array[1, 0] == pytest.approx(1j / 2**0.5)


class TestUnparsable:
    @pytest.mark.parametrize(
        "text",
        [
            "@claim{kind=wormhole, x=1}",
            "@claim{kind=numeric}",
            "@claim{kind=numeric, value=}",
            "@claim{kind=numeric, value=1, bogus=2}",
            "@claim{kind=density_matrix, m=[[0.6,0.5],[0.5]]}",
            "@claim{kind=energy, value=1, system=banana}",
            "@claim{kind=energy, value=1, n=1.5}",
            "@claim{kind=numeric, value=1, domain=prime}",
            "@claim{kind=probabilities, values=[0.5,0.5]",  # unclosed
        ],
    )
    def test_malformed_marks_bundle(self, text):
        bundle = extract_claims(text)
        assert bundle.unparsable is True
        assert bundle.problems

    def test_good_and_bad_mix_still_unparsable(self):
        text = "@claim{kind=numeric, value=1, ref=1} @claim{kind=oops, z=1}"
        bundle = extract_claims(text)
        assert bundle.unparsable is True
        assert len(bundle.claims) == 1  # the good one parsed, but bundle is tainted


class TestValueSyntax:
    def test_split_top_level_respects_nesting(self):
        assert split_top_level("a=[1,2], b=(x:1; y:2), c=3", ",") == [
            "a=[1,2]",
            " b=(x:1; y:2)",
            " c=3",
        ]

    def test_bindings(self):
        assert parse_bindings("(n:0; m:1; L:2.5)") == {
            "n": 0j,
            "m": 1 + 0j,
            "L": 2.5 + 0j,
        }

    def test_flat_list_is_column_vector(self):
        m = parse_matrix_literal("[1/sqrt(2), I/sqrt(2)]")
        assert (m.rows, m.cols) == (2, 1)

    def test_expression_entries(self):
        m = parse_matrix_literal("[[exp(I*pi/4)]]")
        assert m.array[0, 0] == pytest.approx((1 + 1j) / 2**0.5)


class TestRenderRoundTrip:
    @pytest.mark.parametrize(
        "text",
        [
            "@claim{kind=numeric, value=0, ref=n^2*pi^2*hbar^2/(2*m*L^2), where=(n:0; m:1; L:1)}",
            "@claim{kind=energy, value=0, n=0, system=bound_state}",
            "@claim{kind=density_matrix, m=[[0.6,0.5],[0.5,0.4]]}",
            "@claim{kind=commutator, a=exp(-I*w*t)*lower, b=exp(I*w*t)*raise, result=1}",
            "@claim{kind=probabilities, values=[0.25,0.75]}",
            "@claim{kind=eigenvalues, values=[-1,1], m=[[0,1],[1,0]]}",
            "@claim{kind=final_expression, expr=x^2+1, ref=(x+1)^2-2*x, sym_dims=(x:L), target=L^2}",
            "@claim{kind=state_vector, m=[[1/sqrt(2)],[0-1*I/sqrt(2)]]}",
        ],
    )
    def test_parse_render_parse(self, text):
        bundle = extract_claims(text)
        assert not bundle.unparsable, bundle.problems
        (claim,) = bundle.claims
        rendered = render_claim(claim)
        bundle2 = extract_claims(rendered)
        assert not bundle2.unparsable, bundle2.problems
        (claim2,) = bundle2.claims
        # spans differ; compare everything else
        assert _strip_span(claim) == _strip_span(claim2)

    def test_replace_claims_splices(self):
        text = "head @claim{kind=numeric, value=1, ref=1} tail"
        bundle = extract_claims(text)
        (claim,) = bundle.claims
        new = NumericClaim(span=claim.span, value=Num(2.0), reference=parse_expr("1"))
        out = replace_claims(text, {claim.span: new})
        assert out.startswith("head ") and out.endswith(" tail")
        (reclaim,) = extract_claims(out).claims
        assert reclaim.value == Num(2.0)


def _strip_span(claim):
    pairs = {
        k: v for k, v in vars(claim).items() if k != "span"
    }
    return type(claim).__name__, sorted(
        (k, repr(v)) for k, v in pairs.items()
    )
