from fractions import Fraction
from math import ceil, gcd

import pytest
import sympy
from hypothesis import assume, given, strategies as st

from dynamics.iterates import cleared_iterate
from dynamics.newton import (OracleResult, StabilityCertificate, base_irreducibility,
                             certificate_to_dict, certify_iterate, eisenstein_dumas,
                             irreducibility_oracle, newton_polygon, power_free_certificate,
                             stability_certificate)
from tests.helpers import reduced_constants
from utils.errors import InputError

# Reduced nonzero c with h(c) <= 30
constants = st.builds(
    Fraction, st.integers(-30, 30).filter(bool), st.integers(1, 30)
).filter(lambda c: max(abs(c.numerator), c.denominator) <= 30)

# Largest n with d^n <= 16, the oracle's degree cap
ORACLE_DEPTH = {2: 3, 3: 2}

polynomials = st.lists(st.integers(-200, 200), min_size=2, max_size=10).filter(
    lambda coeffs: coeffs[0] != 0 and coeffs[-1] != 0
)


@st.composite
def eisenstein_dumas_polynomials(draw):
    """Coefficients whose p-adic points lie on or above (0, m) -> (k, 0), gcd(k, m) = 1"""
    p = draw(st.sampled_from([2, 3, 5]))
    k = draw(st.integers(2, 6))
    m = draw(st.integers(1, 7).filter(lambda m: gcd(k, m) == 1))
    unit = st.integers(-9, 9).filter(lambda v: v % p != 0)
    coeffs = [p**m * draw(unit)]
    for i in range(1, k):
        coeffs.append(p ** ceil(m * (k - i) / k) * draw(st.integers(-9, 9)))
    coeffs.append(draw(unit))
    return p, coeffs


def slope_lengths(polygon):
    lengths = {}
    for slope, length in polygon.slopes():
        lengths[slope] = lengths.get(slope, 0) + length
    return lengths


class TestNewtonPolygon:
    @pytest.mark.parametrize("coeffs,p,vertices", [
        ([-4, 0, 3], 2, ((0, 2), (2, 0))),
        ([2, 0, 1], 2, ((0, 1), (2, 0))),
        ([-29, 0, 16], 29, ((0, 1), (2, 0))),
        # Collinear middle point is dropped
        ([4, 0, 6, 0, 9], 3, ((0, 0), (4, 2))),
    ])
    def test_vertices(self, coeffs, p, vertices):
        """Test lower hull vertices"""
        assert newton_polygon(coeffs, p).vertices == vertices

    def test_points_skip_zero_coefficients(self):
        """Test that only nonzero coefficients contribute points"""
        polygon = newton_polygon([12, 0, 0, 2, 1], 2)
        assert polygon.points == ((0, 2), (3, 1), (4, 0))

    def test_slopes_strictly_increase(self):
        """Test the minimal vertex set on a polygon with two edges"""
        polygon = newton_polygon([8, 2, 1], 2)
        assert polygon.vertices == ((0, 3), (1, 1), (2, 0))
        slopes = [s for s, _ in polygon.slopes()]
        assert slopes == [Fraction(-2), Fraction(-1)]
        assert slopes == sorted(set(slopes))

    def test_points_on_or_above_hull(self):
        """Test that every point lies on or above the hull"""
        polygon = newton_polygon([48, 6, 0, 4, 3, 1], 2)
        for x, y in polygon.points:
            assert y >= polygon.height_at(x)

    def test_lattice_vertices(self):
        """Test the lattice-point subdivision of each edge"""
        polygon = newton_polygon([-4, 0, 3], 2)
        assert polygon.lattice_vertices() == [(0, 2), (1, 1), (2, 0)]

    @given(polynomials, st.sampled_from([2, 3, 5, 7]))
    def test_hull_properties(self, coeffs, p):
        """Test the hull on random coefficients: bounds, endpoints and convexity"""
        polygon = newton_polygon(coeffs, p)
        assert polygon.vertices[0] == polygon.points[0]
        assert polygon.vertices[-1] == polygon.points[-1]
        assert set(polygon.vertices) <= set(polygon.points)
        for x, y in polygon.points:
            assert y >= polygon.height_at(x)
        slopes = [s for s, _ in polygon.slopes()]
        assert all(a < b for a, b in zip(slopes, slopes[1:]))

    @given(polynomials, polynomials, st.sampled_from([2, 3, 5]))
    def test_product_slopes_add(self, f, g, p):
        """Test that the polygon of f*g joins the edges of f and g by slope"""
        product = [
            sum(f[i] * g[k - i] for i in range(len(f)) if 0 <= k - i < len(g))
            for k in range(len(f) + len(g) - 1)
        ]
        expected = slope_lengths(newton_polygon(f, p))
        for slope, length in slope_lengths(newton_polygon(g, p)).items():
            expected[slope] = expected.get(slope, 0) + length
        assert slope_lengths(newton_polygon(product, p)) == expected

    def test_not_prime(self):
        with pytest.raises(InputError):
            newton_polygon([2, 0, 1], 4)

    def test_to_dict(self):
        data = newton_polygon([-29, 0, 16], 29).to_dict()
        assert data["p"] == "29"
        assert data["vertices"] == [[0, 1], [2, 0]]


class TestEisensteinDumas:
    @pytest.mark.parametrize("coeffs,p,expected", [
        ([2, 0, 1], 2, True),
        ([-4, 0, 3], 2, False),
        ([4, 0, 6, 0, 9], 3, False),
        ([-29, 0, 16], 29, True),
        # x^3 + 4: segment (0, 2) -> (3, 0) with gcd(3, 2) = 1
        ([4, 0, 0, 1], 2, True),
    ])
    def test_criterion(self, coeffs, p, expected):
        """Test the single-segment shape with coprime length and height"""
        assert eisenstein_dumas(coeffs, p) is expected

    @given(eisenstein_dumas_polynomials())
    def test_constructed_hits_are_irreducible(self, case):
        """Test that a criterion hit is never split by the oracle or by sympy"""
        p, coeffs = case
        assert eisenstein_dumas(coeffs, p)
        assert irreducibility_oracle(coeffs).verdict != "reducible"
        x = sympy.Symbol("x")
        assert sympy.Poly(list(reversed(coeffs)), x).is_irreducible

    def test_zero_constant(self):
        """Test that a zero constant term is rejected"""
        with pytest.raises(InputError):
            eisenstein_dumas([0, 1, 1], 2)


class TestBaseIrreducibility:
    @pytest.mark.parametrize("d,c,expected", [
        (2, Fraction(-4, 3), True),
        (2, Fraction(-9, 16), False),
        (4, Fraction(4), False),
        (3, Fraction(8), False),
        (3, Fraction(2), True),
        (4, Fraction(-4), False),
        (4, Fraction(-3), True),
    ])
    def test_criterion(self, d, c, expected):
        """Test -c not a p-th power for p | d, and the 4 | d exception"""
        assert base_irreducibility(d, c) is expected

    @given(constants, st.integers(2, 6))
    def test_minus_dth_power_is_reducible(self, a, d):
        """Test that x^d - a^d always has the factor x - a"""
        assert base_irreducibility(d, -a**d) is False

    @given(constants)
    def test_quadratic_matches_square_test(self, c):
        """Test that x^2 + c splits exactly when -c is a rational square"""
        root = -c
        is_square = root > 0 and all(
            sympy.integer_nthroot(part, 2)[1] for part in (root.numerator, root.denominator)
        )
        assert base_irreducibility(2, c) is (not is_square)

    @given(constants, st.integers(2, 4))
    def test_matches_sympy(self, c, d):
        """Test against sympy's factorization of x^d + c"""
        x = sympy.Symbol("x")
        expected = sympy.Poly(x**d + sympy.Rational(c.numerator, c.denominator), x).is_irreducible
        assert base_irreducibility(d, c) is expected

    def test_zero_constant(self):
        with pytest.raises(InputError):
            base_irreducibility(2, Fraction(0))


class TestStability:
    @pytest.mark.parametrize("d,c,expected", [
        (2, Fraction(3, 5), StabilityCertificate(p=3, e=1)),
        (2, Fraction(-4, 3), None),
        (2, Fraction(12, 7), StabilityCertificate(p=3, e=1)),
        (3, Fraction(-29, 16), StabilityCertificate(p=29, e=1)),
        (3, Fraction(8), None),
        (3, Fraction(4), StabilityCertificate(p=2, e=2)),
    ])
    def test_certificate(self, d, c, expected):
        """Test the smallest prime with gcd(nu_p(c1), d) = 1"""
        assert stability_certificate(d, c) == expected

    def test_certificate_to_dict(self):
        """Test that a missing certificate reads as unknown, never as unstable"""
        assert certificate_to_dict(None) == {"stable": "unknown"}
        assert certificate_to_dict(StabilityCertificate(p=3, e=1)) == {
            "stable": True, "p": "3", "e": 1,
        }

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_certificate_holds_on_iterates(self, n):
        """Test that every iterate is Eisenstein-Dumas at the certificate prime"""
        c = Fraction(12, 7)
        certificate = stability_certificate(2, c)
        assert certify_iterate(2, c, certificate, n)

    @given(constants, st.sampled_from([2, 3]))
    def test_certificate_agrees_with_oracle(self, c, d):
        """Test that no certified iterate is split by the oracle"""
        certificate = stability_certificate(d, c)
        assume(certificate is not None)
        c1, c2 = c.numerator, c.denominator
        for n in range(1, ORACLE_DEPTH[d] + 1):
            assert certify_iterate(d, c, certificate, n)
            result = irreducibility_oracle(cleared_iterate(d, c1, c2, n).full_degree())
            assert not result.reducible

    @pytest.mark.slow
    @pytest.mark.parametrize("d", [2, 3])
    def test_certificate_sweep(self, d):
        """Test certificates against the oracle on a stride of every h(c) <= 30"""
        checked = 0
        for c in reduced_constants(30)[::7]:
            if c == 0:
                continue
            certificate = stability_certificate(d, c)
            if certificate is None:
                continue
            for n in range(1, ORACLE_DEPTH[d] + 1):
                cleared = cleared_iterate(d, c.numerator, c.denominator, n)
                assert not irreducibility_oracle(cleared.full_degree()).reducible
            checked += 1
        assert checked > 50

    def test_iterate_polygon_is_single_segment(self):
        """Test the hull (0, e) -> (d^n, 0) on H_3 of x^2 + 3/5"""
        cleared = cleared_iterate(2, 3, 5, 3)
        polygon = newton_polygon(cleared.full_degree(), 3)
        assert polygon.vertices == ((0, 1), (8, 0))

    def test_zero_constant(self):
        with pytest.raises(InputError):
            stability_certificate(2, Fraction(0))

    def test_power_free_certificate(self):
        """Test the prime-degree variant on |c1|"""
        assert power_free_certificate(3, Fraction(16, 27))
        assert not power_free_certificate(3, Fraction(-8, 5))
        assert not power_free_certificate(2, Fraction(1, 3))
        with pytest.raises(InputError):
            power_free_certificate(4, Fraction(3))


class TestIrreducibilityOracle:
    def test_reducible_second_iterate(self):
        """Test that H_2 of x^2 - 4/3 splits, with the canonical witness"""
        result = irreducibility_oracle([4, 0, -24, 0, 9])
        assert result.reducible
        assert result.witness == (2, -6, 3)

    def test_cleared_second_iterate_matches(self):
        """Test the same polynomial produced by cleared_iterate"""
        cleared = cleared_iterate(2, -4, 3, 2)
        assert cleared.full_degree() == [4, 0, -24, 0, 9]

    @pytest.mark.parametrize("coeffs", [
        [1, 0, 0, 0, 1],
        [-29, 0, 16],
        [2, 0, 1],
        [4, 0, 6, 0, 9],
    ])
    def test_irreducible(self, coeffs):
        """Test classical irreducible polynomials"""
        assert irreducibility_oracle(coeffs) == OracleResult("irreducible")

    def test_x4_plus_4(self):
        """Test x^4 + 4 = (x^2 - 2x + 2)(x^2 + 2x + 2)"""
        result = irreducibility_oracle([4, 0, 0, 0, 1])
        assert result.reducible
        assert result.witness == (2, -2, 1)

    def test_linear_factor(self):
        """Test a polynomial with a rational root"""
        result = irreducibility_oracle([-6, 1, 1])
        assert result.reducible
        assert result.witness == (-2, 1)

    def test_repeated_factor(self):
        """Test that a square factor is found through gcd(f, f')"""
        result = irreducibility_oracle([1, 0, 2, 0, 1])
        assert result.reducible
        assert result.witness == (1, 0, 1)

    def test_zero_constant(self):
        result = irreducibility_oracle([0, 3, 1])
        assert result.witness == (0, 1)

    def test_degree_cap(self):
        with pytest.raises(InputError):
            irreducibility_oracle([1] + [0] * 20 + [1], max_degree=16)

    def test_constant(self):
        with pytest.raises(InputError):
            irreducibility_oracle([5])

    def test_to_dict(self):
        data = irreducibility_oracle([4, 0, -24, 0, 9]).to_dict()
        assert data == {"verdict": "reducible", "witness": ["2", "-6", "3"]}
