"""Newton polygons, Eisenstein-Dumas certificates and irreducibility checks.

Coefficient lists are low degree first: ``coeffs[i]`` multiplies x^i.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd, isqrt
from typing import List, Optional, Sequence, Tuple

from sympy.polys.densearith import dup_div, dup_max_norm, dup_mul
from sympy.polys.densebasic import dup_LC, dup_degree
from sympy.polys.densetools import dup_diff, dup_primitive, dup_trunc
from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_gcd
from sympy.polys.factortools import dup_zz_hensel_lift
from sympy.polys.galoistools import gf_factor_sqf, gf_from_int_poly, gf_sqf_p

from dynamics.iterates import cleared_iterate
from utils.config import settings
from utils.errors import InputError
from utils.factor import factor_complete, is_prime, primes_up_to
from utils.rational import BigRat, int_valuation, is_pth_power_rational, split

logger = logging.getLogger(__name__)

Point = Tuple[int, int]


@dataclass(frozen=True)
class NewtonPolygon:
    p: int
    points: Tuple[Point, ...]
    # Minimal vertex set: consecutive slopes strictly increase
    vertices: Tuple[Point, ...]

    def slopes(self) -> List[Tuple[Fraction, int]]:
        """(slope, horizontal length) of each edge, left to right"""
        return [
            (Fraction(y2 - y1, x2 - x1), x2 - x1)
            for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:])
        ]

    def lattice_vertices(self) -> List[Point]:
        """Vertices together with every lattice point on the edges"""
        result = [self.vertices[0]]
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            steps = gcd(x2 - x1, abs(y2 - y1))
            dx, dy = (x2 - x1) // steps, (y2 - y1) // steps
            result.extend((x1 + k * dx, y1 + k * dy) for k in range(1, steps + 1))
        return result

    def height_at(self, x: int) -> Fraction:
        """The hull's height above abscissa x (within its range)"""
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:]):
            if x1 <= x <= x2:
                return y1 + Fraction((y2 - y1) * (x - x1), x2 - x1)
        raise InputError(f"{x} is outside the polygon's range")

    def to_dict(self) -> dict:
        return {
            "p": str(self.p),
            "points": [list(pt) for pt in self.points],
            "vertices": [list(pt) for pt in self.vertices],
        }


@dataclass(frozen=True)
class StabilityCertificate:
    p: int
    e: int

    def to_dict(self) -> dict:
        return {"stable": True, "p": str(self.p), "e": self.e}


def certificate_to_dict(certificate: Optional[StabilityCertificate]) -> dict:
    # No converse exists, so a missing certificate is "unknown", not "unstable"
    if certificate is None:
        return {"stable": "unknown"}
    return certificate.to_dict()


@dataclass(frozen=True)
class OracleResult:
    verdict: str  # "irreducible", "reducible" or "unknown"
    witness: Optional[Tuple[int, ...]] = None

    @property
    def reducible(self) -> bool:
        return self.verdict == "reducible"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else [str(a) for a in self.witness],
        }


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _coefficient_valuation(p: int, a) -> int:
    a = Fraction(a)
    return int_valuation(p, a.numerator) - int_valuation(p, a.denominator)


def newton_polygon(coeffs: Sequence, p: int) -> NewtonPolygon:
    """
    Lower convex hull of the points (i, nu_p(a_i)) over nonzero coefficients

    Args:
        coeffs: Integer (or rational) coefficients, constant term first
        p: A prime

    Returns:
        NewtonPolygon: Points and the minimal hull vertices
    """
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    points = [(i, _coefficient_valuation(p, a)) for i, a in enumerate(coeffs) if a != 0]
    if len(points) < 2:
        raise InputError("Newton polygon needs at least two nonzero coefficients")

    # Monotone chain; collinear points are dropped
    hull: List[Point] = []
    for point in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], point) <= 0:
            hull.pop()
        hull.append(point)
    return NewtonPolygon(p=p, points=tuple(points), vertices=tuple(hull))


def _trim(coeffs: Sequence) -> List:
    values = list(coeffs)
    while values and values[-1] == 0:
        values.pop()
    return values


def eisenstein_dumas(coeffs: Sequence, p: int) -> bool:
    """
    Eisenstein-Dumas criterion at p

    True iff the Newton polygon is the single segment (0, m) -> (k, 0) with
    m > 0 and gcd(k, m) = 1; True certifies irreducibility over Q.
    """
    values = _trim(coeffs)
    if not values or values[0] == 0:
        raise InputError("Eisenstein-Dumas needs nonzero constant and leading coefficients")
    polygon = newton_polygon(values, p)
    if len(polygon.vertices) != 2:
        return False
    (x0, m), (k, y1) = polygon.vertices
    result = x0 == 0 and y1 == 0 and m > 0 and gcd(k, m) == 1
    logger.debug(f"Eisenstein-Dumas at p={p}: vertices {polygon.vertices} -> {result}")
    return result


def base_irreducibility(d: int, c: BigRat) -> bool:
    """
    Irreducibility of x^d + c over Q

    x^d + c is irreducible iff -c is not a p-th power for each prime p | d,
    and c is not 4 times a 4th power when 4 | d.
    """
    c = Fraction(c)
    if c == 0:
        raise InputError("x^d is reducible for d >= 2; c must be nonzero")
    if d < 2:
        raise InputError(f"degree d must be at least 2, got {d}")
    for p in factor_complete(d).primes:
        if is_pth_power_rational(-c, p):
            return False
    if d % 4 == 0 and is_pth_power_rational(c / 4, 4):
        return False
    return True


def stability_certificate(d: int, c: BigRat) -> Optional[StabilityCertificate]:
    """
    Looks for a prime p | c1 with gcd(nu_p(c1), d) = 1

    Such a prime makes every cleared iterate Eisenstein-Dumas at p, so every
    iterate of x^d + c is irreducible.

    Args:
        d: Degree
        c: Nonzero rational constant

    Returns:
        Optional[StabilityCertificate]: The smallest such prime and its exponent
    """
    c = Fraction(c)
    if c == 0:
        raise InputError("stability certificates need c != 0")
    c1, _ = split(c)
    for p, e in factor_complete(c1).factors:
        if gcd(e, d) == 1:
            logger.info(f"x^{d} + {c} is stable: p={p}, e={e}")
            return StabilityCertificate(p=p, e=e)
    logger.info(f"No stability certificate for x^{d} + {c}")
    return None


def certify_iterate(d: int, c: BigRat, certificate: StabilityCertificate, n: int) -> bool:
    """Re-checks a certificate on H_n: Eisenstein-Dumas at the certificate prime"""
    c1, c2 = split(Fraction(c))
    cleared = cleared_iterate(d, c1, c2, n)
    return eisenstein_dumas(cleared.full_degree(), certificate.p)


def power_free_certificate(d: int, c: BigRat) -> bool:
    """For prime d: True iff |c1| is not a perfect d-th power (and |c1| > 1)"""
    if not is_prime(d):
        raise InputError(f"power_free_certificate needs a prime degree, got {d}")
    c1, _ = split(Fraction(c))
    if abs(c1) <= 1:
        return False
    return not is_pth_power_rational(abs(c1), d)


def _canonical(f: list) -> Tuple[int, ...]:
    """Primitive, positive leading coefficient, constant term first"""
    _, f = dup_primitive(f, ZZ)
    if dup_LC(f, ZZ) < 0:
        f = [-a for a in f]
    return tuple(int(a) for a in reversed(f))


def _degree_sums(degrees: List[int]) -> set:
    sums = {0}
    for k in degrees:
        sums |= {s + k for s in sums}
    return sums


def _modular_factorizations(f: list, count: int):
    """Yields (p, factors of f mod p) for the first `count` primes where f stays squarefree"""
    lc = dup_LC(f, ZZ)
    found = 0
    for p in primes_up_to(settings.factor_trial_limit):
        if lc % p == 0:
            continue
        F = gf_from_int_poly([int(a) for a in f], p)
        if not gf_sqf_p(F, p, ZZ):
            continue
        _, factors = gf_factor_sqf(F, p, ZZ)
        yield p, factors
        found += 1
        if found == count:
            return


def irreducibility_oracle(
    coeffs: Sequence[int],
    max_degree: Optional[int] = None,
    primes: Optional[int] = None,
    subset_budget: Optional[int] = None,
) -> OracleResult:
    """
    Decides irreducibility over Q of a small integer polynomial

    Reduction modulo a few primes either proves irreducibility (a single
    modular factor, or degree patterns with no common proper subset sum).
    Otherwise the modular factors are Hensel-lifted and recombined; the first
    recombination size that yields true factors decides, and the canonical
    factor among them (primitive, positive leading coefficient, least
    coefficient tuple) is returned as the witness.

    Args:
        coeffs: Integer coefficients, constant term first
        max_degree: Degree cap (settings.oracle_max_degree)
        primes: Number of primes for degree patterns (settings.oracle_primes)
        subset_budget: Cap on recombination trials (settings.oracle_subset_budget)

    Returns:
        OracleResult: irreducible, reducible with a witness factor, or unknown
    """
    max_degree = settings.oracle_max_degree if max_degree is None else max_degree
    primes = settings.oracle_primes if primes is None else primes
    subset_budget = settings.oracle_subset_budget if subset_budget is None else subset_budget

    values = [int(a) for a in _trim(coeffs)]
    n = len(values) - 1
    if n < 1:
        raise InputError("irreducibility is undefined for constant polynomials")
    if n > max_degree:
        raise InputError(f"degree {n} exceeds the oracle cap {max_degree}")

    f = [ZZ(a) for a in reversed(values)]
    _, f = dup_primitive(f, ZZ)
    if dup_LC(f, ZZ) < 0:
        f = [-a for a in f]

    if n == 1:
        return OracleResult("irreducible")
    if values[0] == 0:
        return OracleResult("reducible", (0, 1))

    # A repeated factor shows up in gcd(f, f')
    g = dup_gcd(f, dup_diff(f, 1, ZZ), ZZ)
    if dup_degree(g) > 0:
        return OracleResult("reducible", _canonical(g))

    # Degree patterns modulo small primes
    best = None
    common = set(range(1, n))
    for p, factors in _modular_factorizations(f, primes):
        if len(factors) == 1:
            logger.debug(f"irreducible modulo {p}")
            return OracleResult("irreducible")
        common &= _degree_sums([len(h) - 1 for h in factors])
        if not common:
            logger.debug("degree patterns are incompatible")
            return OracleResult("irreducible")
        if best is None or len(factors) < len(best[1]):
            best = (p, factors)
    if best is None:
        return OracleResult("unknown")

    # Hensel lift past twice the Mignotte bound, then recombine
    p, factors = best
    lc = dup_LC(f, ZZ)
    bound = (isqrt(n + 1) + 1) * 2**n * int(dup_max_norm(f, ZZ)) * abs(int(lc))
    modulus, exponent = p, 1
    while modulus <= 2 * bound:
        modulus *= p
        exponent += 1
    lifted = dup_zz_hensel_lift(ZZ(p), f, [[ZZ(a) for a in h] for h in factors], exponent, ZZ)

    r = len(lifted)
    trials = 0
    for size in range(1, r // 2 + 1):
        found = []
        for subset in combinations(lifted, size):
            trials += 1
            if trials > subset_budget:
                logger.warning(f"Oracle subset budget {subset_budget} exhausted at degree {n}")
                return OracleResult("unknown")
            G = [lc]
            for h in subset:
                G = dup_mul(G, h, ZZ)
            G = dup_trunc(G, ZZ(modulus), ZZ)
            _, G = dup_primitive(G, ZZ)
            if dup_degree(G) < 1:
                continue
            _, remainder = dup_div(f, G, ZZ)
            if not remainder:
                found.append(_canonical(G))
        if found:
            return OracleResult("reducible", min(found))
    return OracleResult("irreducible")
