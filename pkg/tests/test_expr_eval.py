import cmath
import random

import pytest

from qreward.expr import (
    DivisionByZero,
    UnboundSymbol,
    equiv_probe,
    eval_expr,
    free_symbols,
    parse_expr,
    sample_bindings,
)

ENERGY_FORMULA = "n^2*pi^2*hbar^2/(2*m*L^2)"


class TestEval:
    def test_energy_formula_n0_is_zero(self):
        ast = parse_expr(ENERGY_FORMULA)
        for m, L in ((1.0, 1.0), (9.11e-31, 1e-9), (2.5, 0.3)):
            assert eval_expr(ast, {"n": 0, "m": m, "L": L}) == 0j

    def test_conjugate_sum(self):
        assert eval_expr(parse_expr("x+conj(x)"), {"x": 2 + 3j}) == 4 + 0j

    def test_euler_identity(self):
        assert abs(eval_expr(parse_expr("exp(-I*pi)")) - (-1 + 0j)) < 1e-12

    def test_hbar_defaults_to_one(self):
        assert eval_expr(parse_expr("hbar")) == 1 + 0j

    def test_hbar_override(self):
        assert eval_expr(parse_expr("2*hbar"), {"hbar": 1.054e-34}) == 2 * 1.054e-34

    def test_unbound_symbol(self):
        with pytest.raises(UnboundSymbol):
            eval_expr(parse_expr("x+y"), {"x": 1.0})

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZero):
            eval_expr(parse_expr("1/x"), {"x": 0.0})

    def test_zero_to_negative_power(self):
        with pytest.raises(DivisionByZero):
            eval_expr(parse_expr("x^-1"), {"x": 0.0})

    def test_principal_sqrt_of_negative(self):
        # complex mode: never a domain error
        assert eval_expr(parse_expr("sqrt(x)"), {"x": -4.0}) == 2j

    def test_abs_returns_modulus(self):
        assert eval_expr(parse_expr("abs(x)"), {"x": 3 + 4j}) == 5 + 0j


class TestEquivProbe:
    def test_binomial_identity(self):
        assert equiv_probe("(x+1)^2", "x^2+2*x+1") is True

    def test_distinguishes_powers(self):
        assert equiv_probe("n^2", "n^3") is False

    def test_phase_cancellation(self):
        # sympy oracle: simplify(exp(I*t)*exp(-I*t)) == 1
        import sympy

        t = sympy.Symbol("t")
        assert sympy.simplify(sympy.exp(sympy.I * t) * sympy.exp(-sympy.I * t)) == 1
        assert equiv_probe("exp(I*t)*exp(-I*t)", "1") is True

    def test_reflexive_and_symmetric(self):
        import helpers

        rng = random.Random(99)
        checked = 0
        while checked < 1000:
            a = helpers.random_ast(rng)
            b = helpers.random_ast(rng)
            try:
                assert equiv_probe(a, a, trials=4, seed=checked) is True
                ab = equiv_probe(a, b, trials=4, seed=checked)
                ba = equiv_probe(b, a, trials=4, seed=checked)
            except Exception:
                continue  # singular/overflowing sample; property targets evaluable pairs
            assert ab == ba
            checked += 1

    def test_trials_must_be_positive(self):
        with pytest.raises(ValueError):
            equiv_probe("x", "x", trials=0)

    def test_retry_then_propagate_division(self):
        with pytest.raises(DivisionByZero):
            equiv_probe("1/(x-x)", "1", trials=1)


class TestSampler:
    def test_deterministic(self):
        rng1, rng2 = random.Random(5), random.Random(5)
        syms = frozenset({"a", "b"})
        assert sample_bindings(syms, rng1) == sample_bindings(syms, rng2)

    def test_moduli_bounded(self):
        rng = random.Random(1)
        for _ in range(200):
            (value,) = sample_bindings({"x"}, rng).values()
            assert 0.5 <= abs(value) <= 2.0

    def test_covers_free_symbols(self):
        ast = parse_expr("exp(I*t)*exp(-I*t)")
        rng = random.Random(3)
        assert set(sample_bindings(free_symbols(ast), rng)) == {"t"}


def test_tolerance_is_relative():
    # values agree to ~1e-12 relative at magnitude ~1e6
    big_a = "1000000*x"
    big_b = "1000000*x+x*1e-6"
    assert equiv_probe(big_a, big_b, tol=1e-9) is True
    assert equiv_probe(big_a, big_b, tol=1e-15) is False


def test_probe_matches_cmath_reference():
    # independent evaluation of a fixed point
    ast = parse_expr("exp(-I*omega*t)")
    val = eval_expr(ast, {"omega": 2.0, "t": 0.75})
    assert abs(val - cmath.exp(-1j * 1.5)) < 1e-15
