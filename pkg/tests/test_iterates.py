from fractions import Fraction
from math import gcd

import pytest
import sympy
from hypothesis import given, settings as hypothesis_settings, strategies as st

from dynamics.iterates import (ClearedIterate, CriticalOrbit, check_size, cleared_iterate,
                               critical_orbit, critical_terms, cycle_polynomial, g_poly,
                               iterate_coeffs, orbit_eval)
from tests.helpers import naive_iterate
from utils.errors import InputError, SizeGuardError

# Reduced c with h(c) <= 50
constants = st.builds(
    Fraction, st.integers(-50, 50), st.integers(1, 50)
).filter(lambda c: max(abs(c.numerator), c.denominator) <= 50)


class TestGPoly:
    @pytest.mark.parametrize("d,n,expected", [
        (2, 2, [1]),
        (2, 3, [1, 2, 1]),
        (3, 3, [1, 0, 3, 0, 3, 0, 1]),
    ])
    def test_small_cases(self, d, n, expected):
        """Test g_n against hand expansions"""
        assert g_poly(d, n) == expected

    def test_degree(self):
        """Test that g_n has degree d^(n-1) - d"""
        assert len(g_poly(2, 5)) - 1 == 2**4 - 2
        assert len(g_poly(3, 4)) - 1 == 3**3 - 3

    def test_index_below_two(self):
        """Test that g_1 is rejected"""
        with pytest.raises(InputError):
            g_poly(2, 1)

    @given(constants, st.integers(2, 4), st.integers(2, 4))
    def test_critical_value_identity(self, c, d, n):
        """Test f^n(0) = c + c^d g_n(c)"""
        g = g_poly(d, n)
        value = sum(a * c**i for i, a in enumerate(g))
        assert orbit_eval(d, c, 0, n)[-1] == c + c**d * value


class TestIterateCoeffs:
    @pytest.mark.parametrize("d,c,n,expected", [
        (2, 1, 2, [2, 2, 1]),
        (2, 0, 3, [0, 0, 0, 0, 1]),
        (3, -1, 2, [-2, 3, -3, 1]),
    ])
    def test_small_cases(self, d, c, n, expected):
        """Test f^n tables against direct expansion"""
        table = iterate_coeffs(d, Fraction(c), n)
        assert list(table.coeffs) == [Fraction(v) for v in expected]

    def test_coefficient_lookup(self):
        """Test lookup by exponent, including exponents off the d-grid"""
        table = iterate_coeffs(2, Fraction(1), 2)
        assert table.coefficient(4) == 1
        assert table.coefficient(2) == 2
        assert table.coefficient(3) == 0
        assert table.coefficient(10) == 0

    @given(constants, st.integers(2, 4), st.integers(1, 3))
    def test_matches_naive_substitution(self, c, d, n):
        """Test every coefficient against repeated substitution"""
        table = iterate_coeffs(d, c, n)
        naive = naive_iterate(d, c, n)
        for exponent, value in enumerate(naive):
            assert table.coefficient(exponent) == value

    @given(constants.filter(lambda c: c != 0), st.integers(2, 3), st.integers(1, 3))
    def test_top_coefficient_and_length(self, c, d, n):
        """Test f_top = 1 and the d^(n-1) + 1 slots"""
        table = iterate_coeffs(d, c, n)
        assert table.coeffs[-1] == 1
        assert len(table.coeffs) == d ** (n - 1) + 1

    def test_formal_degrees(self):
        """Test deg_c f_i = d^(n-1) - i on the symbolic iterate"""
        x, c = sympy.symbols("x c")
        for d, n in ((2, 3), (3, 2), (2, 4)):
            f = x
            for _ in range(n):
                f = sympy.expand(f**d + c)
            poly = sympy.Poly(f, x)
            top = d ** (n - 1)
            for i in range(top + 1):
                coefficient = poly.coeff_monomial(x ** (i * d))
                assert sympy.degree(coefficient, c) == top - i


class TestClearedIterate:
    @pytest.mark.parametrize("args,expected", [
        ((2, 1, 2, 2), [3, 4, 4]),
        ((2, -29, 16, 1), [-29, 16]),
        ((2, 1, 3, 2), [4, 6, 9]),
    ])
    def test_small_cases(self, args, expected):
        """Test cleared integer forms"""
        assert list(cleared_iterate(*args).F) == expected

    @given(constants, st.integers(2, 4), st.integers(1, 4))
    def test_invariants(self, c, d, n):
        """Test the top coefficient, the c1 c2^i divisibility and the F_0 term"""
        c1, c2 = c.numerator, c.denominator
        cleared = cleared_iterate(d, c1, c2, n)
        top = d ** (n - 1)
        assert cleared.top == top
        assert cleared.F[top] == c2**top
        for i in range(top):
            if c1 != 0:
                assert cleared.F[i] % (c1 * c2**i) == 0
            else:
                assert cleared.F[i] == 0
        assert cleared.F[0] == critical_terms(d, c1, c2, n)[-1]
        assert gcd(c2, cleared.F[0]) == 1

    @given(constants, st.integers(2, 3), st.integers(1, 3))
    def test_scaled_table(self, c, d, n):
        """Test F_i = c2^(d^(n-1)) f_i"""
        cleared = cleared_iterate(d, c.numerator, c.denominator, n)
        table = iterate_coeffs(d, c, n)
        scale = c.denominator**cleared.top
        assert [Fraction(v) for v in cleared.F] == [scale * a for a in table.coeffs]

    @pytest.mark.slow
    @hypothesis_settings(max_examples=500, deadline=None)
    @given(constants, st.sampled_from([
        (2, 1), (2, 4), (2, 7), (3, 2), (3, 4), (4, 3), (5, 2), (5, 3),
    ]))
    def test_cleared_matches_naive(self, c, shape):
        """Test H_n against naive substitution for d up to 5 and d^(n-1) <= 64"""
        d, n = shape
        c1, c2 = c.numerator, c.denominator
        cleared = cleared_iterate(d, c1, c2, n)
        top = d ** (n - 1)
        naive = naive_iterate(d, c, n)
        assert cleared.full_degree() == [c2**top * a for a in naive]
        assert cleared.F[top] == c2**top
        assert gcd(c2, cleared.F[0]) == 1

    def test_full_degree_vector(self):
        """Test the expansion to every power of x"""
        cleared = cleared_iterate(2, 1, 3, 2)
        assert cleared.full_degree() == [4, 0, 6, 0, 9]

    def test_dict_round_trip(self):
        """Test the JSON shape with big integers as strings"""
        cleared = cleared_iterate(2, -29, 16, 3)
        data = cleared.to_dict()
        assert data["c1"] == "-29"
        assert all(isinstance(v, str) for v in data["F"])
        assert ClearedIterate.from_dict(data) == cleared

    def test_not_coprime(self):
        """Test that c1, c2 must be coprime with c2 > 0"""
        with pytest.raises(InputError):
            cleared_iterate(2, 2, 4, 2)
        with pytest.raises(InputError):
            cleared_iterate(2, 1, -3, 2)

    def test_size_guard(self):
        """Test that oversized iterates are refused before any work"""
        with pytest.raises(SizeGuardError) as exc_info:
            cleared_iterate(2, 1, 1, 30, max_slots=1024)
        assert exc_info.value.slots == 2**29
        assert exc_info.value.allowed == 1024

    def test_size_guard_uses_settings(self, override_settings):
        """Test that the default guard comes from settings"""
        override_settings(iterate_max_slots=4)
        assert check_size(2, 3) == 4
        with pytest.raises(SizeGuardError):
            check_size(2, 4)


def test_cycle_polynomial_vanishes_on_cycles():
    """Test that the 3-cycle of x^2 - 29/16 are roots of G^3"""
    coeffs = cycle_polynomial(2, -29, 16, 3)
    for u in (Fraction(-7, 4), Fraction(5, 4), Fraction(-1, 4)):
        assert sum(a * u**i for i, a in enumerate(coeffs)) == 0


class TestOrbits:
    @pytest.mark.parametrize("d,c,u,steps,expected", [
        (2, -1, 0, 4, [0, -1, 0, -1, 0]),
        (2, Fraction(-29, 16), Fraction(-1, 4), 3,
         [Fraction(-1, 4), Fraction(-7, 4), Fraction(5, 4), Fraction(-1, 4)]),
        (3, 0, 2, 2, [2, 8, 512]),
    ])
    def test_orbit_eval(self, d, c, u, steps, expected):
        """Test exact orbit evaluation"""
        assert orbit_eval(d, Fraction(c), Fraction(u), steps) == expected

    def test_orbit_eval_negative_steps(self):
        with pytest.raises(InputError):
            orbit_eval(2, Fraction(1), Fraction(0), -1)

    @pytest.mark.parametrize("args,expected", [
        ((2, -29, 16, 3), [-29, 377, 23345]),
        ((2, 1, 1, 4), [1, 2, 5, 26]),
        ((2, -1, 1, 3), [-1, 0, -1]),
    ])
    def test_critical_orbit_terms(self, args, expected):
        """Test the cleared critical orbit"""
        assert list(critical_orbit(*args).terms) == expected

    def test_critical_orbit_zero_terms(self):
        """Test that zero terms are flagged and carry no factorization"""
        orbit = critical_orbit(2, -1, 1, 3)
        assert orbit.zero_indices == [2]
        assert orbit.factorizations[1] is None
        assert orbit.to_dict()["zero"] == [False, True, False]
        assert CriticalOrbit.from_dict(orbit.to_dict()).terms == orbit.terms

    def test_critical_orbit_factorizations(self):
        """Test the factorization attached to each term"""
        orbit = critical_orbit(2, -29, 16, 3)
        assert orbit.factorizations[2].primes == (5, 7, 23, 29)
        assert orbit.term(2) == 377

    @given(constants, st.integers(2, 3))
    def test_divisibility_sequence(self, c, d):
        """Test F_0^m | F_0^n for m | n"""
        terms = critical_terms(d, c.numerator, c.denominator, 6 if d == 2 else 4)
        for m in range(1, len(terms) + 1):
            for n in range(2 * m, len(terms) + 1, m):
                if terms[m - 1] != 0:
                    assert terms[n - 1] % terms[m - 1] == 0
