"""Exact algebra: ring axioms, canonical form, evaluation homomorphism."""

import math
import random
from fractions import Fraction

import pytest

from kgflow import halfalg as ha
from kgflow.halfalg import (BRACKET_DPHI, BRACKET_DPHI_INV, DPHI, ONE, OMEGA0,
                            OMEGA1, PHI, S, S_INV, X, ZERO, HalfExpr,
                            from_poly, from_rational, he_add, he_eval,
                            he_is_zero, he_mul)


def random_expr(rng, max_deg=4, max_pow=2):
    even = [Fraction(rng.randint(-6, 6), rng.randint(1, 5))
            for _ in range(rng.randint(0, max_deg))]
    odd = [Fraction(rng.randint(-6, 6), rng.randint(1, 5))
           for _ in range(rng.randint(0, max_deg))]
    return HalfExpr(even, odd, rng.randint(0, max_pow))


class TestRingAxioms:
    def test_axioms_random(self):
        rng = random.Random(7)
        for _ in range(200):
            a, b, c = (random_expr(rng) for _ in range(3))
            assert a + b == b + a
            assert a * b == b * a
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a + ZERO == a
            assert a * ONE == a
            assert a - a == ZERO
            assert (a * ZERO).is_zero()

    def test_pow_matches_repeated_product(self):
        rng = random.Random(3)
        for _ in range(20):
            a = random_expr(rng)
            assert a ** 3 == a * a * a
            assert a ** 0 == ONE


class TestCanonicalForm:
    def test_canonicalization_idempotent(self):
        rng = random.Random(11)
        for _ in range(100):
            a = random_expr(rng)
            again = HalfExpr(a.even, a.odd, a.denom_pow)
            assert again.even == a.even
            assert again.odd == a.odd
            assert again.denom_pow == a.denom_pow

    def test_common_factor_stripped(self):
        # (1-x^2)/(1-x^2) reduces to 1
        e = HalfExpr((1, 0, -1), (), 1)
        assert e == ONE
        assert e.denom_pow == 0

    def test_negative_denominator_power_lifts(self):
        e = HalfExpr((1,), (), -1)
        assert e == from_poly([1, 0, -1])

    def test_zero_representations_agree(self):
        assert HalfExpr((), (), 2) == ZERO
        assert he_is_zero(HalfExpr((0, 0), (0,), 1))


class TestEvaluation:
    def test_homomorphism_1000_cases(self):
        rng = random.Random(42)
        for _ in range(1000):
            a, b = random_expr(rng), random_expr(rng)
            x = rng.uniform(-0.9, 0.9)
            va, vb = a.eval(x), b.eval(x)
            prod = (a * b).eval(x)
            total = (a + b).eval(x)
            scale = max(1.0, abs(va * vb))
            assert abs(prod - va * vb) <= 1e-12 * scale
            assert abs(total - (va + vb)) <= 1e-12 * max(1.0, abs(va + vb))

    def test_eval_outside_domain_raises(self):
        with pytest.raises(ValueError):
            S.eval(1.0)
        with pytest.raises(ValueError):
            S.eval(-1.5)

    def test_eval_array_matches_scalar(self):
        import numpy as np

        rng = random.Random(5)
        e = random_expr(rng)
        xs = np.linspace(-0.9, 0.9, 37)
        arr = e.eval_array(xs)
        for x, v in zip(xs, arr):
            assert v == pytest.approx(e.eval(float(x)), rel=1e-14, abs=1e-14)

    def test_module_level_api(self):
        assert he_eval(he_add(X, ONE), 0.5) == pytest.approx(1.5)
        assert he_eval(he_mul(X, X), 0.5) == pytest.approx(0.25)


class TestNamedConstants:
    def test_omega_identities(self):
        # w0 = 1/s, w1 = -x/s, so w0^2 - w1^2 = 1 and w1/w0 = -x
        assert OMEGA0 * OMEGA0 - OMEGA1 * OMEGA1 == ONE
        assert OMEGA1 == -(X * OMEGA0)

    def test_phase_identities(self):
        assert PHI * PHI == from_poly([1, 0, -1])
        assert S * S_INV == ONE
        assert DPHI == OMEGA1
        # <dphi>^2 = 1 + dphi^2
        assert BRACKET_DPHI ** 2 == ONE + DPHI ** 2
        assert BRACKET_DPHI * BRACKET_DPHI_INV == ONE

    def test_eval_constants(self):
        x = 0.6
        s = math.sqrt(1 - x * x)
        assert OMEGA0.eval(x) == pytest.approx(1 / s)
        assert OMEGA1.eval(x) == pytest.approx(-x / s)
        assert PHI.eval(x) == pytest.approx(s)


class TestPolynomialView:
    def test_as_polynomial_roundtrip(self):
        p = from_poly([Fraction(1, 2), 0, 3])
        assert p.as_polynomial() == (Fraction(1, 2), Fraction(0), Fraction(3))

    def test_as_polynomial_rejects_half_powers(self):
        with pytest.raises(ValueError):
            S.as_polynomial()
        with pytest.raises(ValueError):
            S_INV.as_polynomial()

    def test_from_rational(self):
        assert from_rational(Fraction(2, 3)) * from_rational(3) == \
            from_rational(2)

    def test_coerce_rejects_floats(self):
        with pytest.raises(TypeError):
            ha._coerce(0.5)
