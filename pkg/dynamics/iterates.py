"""Iterates of f(x) = x^d + c: coefficient tables, cleared integer forms, orbits.

f^n only has monomials x^(i*d), so tables store one slot per multiple of d:
``coeffs[i]`` is the coefficient of x^(i*d), i = 0..d^(n-1).

Clearing by c2^(d^(n-1)) gives integer vectors obeying the recursion
    H_1(y) = c2*y + c1,    H_(k+1)(y) = H_k(y)^d + c1*c2^(d^k - 1),   y = x^d,
and the critical orbit terms F_0^k = c2^(d^(k-1)) f^k(0) obey
    a_1 = c1,              a_(k+1) = a_k^d + c1*c2^(d^k - 1).
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Tuple

from sympy.polys.densearith import dup_add_ground, dup_lshift, dup_pow
from sympy.polys.domains import ZZ

from utils.config import settings
from utils.errors import InputError, SizeGuardError
from utils.factor import Factorization, factor
from utils.rational import BigRat, split

logger = logging.getLogger(__name__)


def check_size(d: int, n: int, max_slots: Optional[int] = None) -> int:
    """
    Enforces the size guard on d^(n-1) coefficient slots

    Returns:
        int: d^(n-1)
    """
    if d < 2:
        raise InputError(f"degree d must be at least 2, got {d}")
    if n < 1:
        raise InputError(f"iterate index n must be at least 1, got {n}")
    allowed = settings.iterate_max_slots if max_slots is None else max_slots
    slots = 1
    for _ in range(n - 1):
        slots *= d
        if slots > allowed:
            # Report the full count only when it is cheap to compute
            raise SizeGuardError(d ** (n - 1) if n < 64 else slots, allowed)
    return slots


def check_coprime(c1: int, c2: int) -> None:
    if c2 < 1:
        raise InputError(f"c2 must be positive, got {c2}")
    if gcd(c1, c2) != 1:
        raise InputError(f"c1 = {c1} and c2 = {c2} are not coprime")


def _from_dup(f: list, length: int) -> List[int]:
    values = [int(a) for a in reversed(f)]
    return values + [0] * (length - len(values))


@dataclass(frozen=True)
class IterateTable:
    d: int
    n: int
    c: BigRat
    coeffs: Tuple[BigRat, ...]

    def coefficient(self, exponent: int) -> BigRat:
        """Coefficient of x^exponent in f^n"""
        if exponent % self.d:
            return Fraction(0)
        i = exponent // self.d
        return self.coeffs[i] if i < len(self.coeffs) else Fraction(0)


@dataclass(frozen=True)
class ClearedIterate:
    d: int
    n: int
    c1: int
    c2: int
    F: Tuple[int, ...]

    @property
    def top(self) -> int:
        return len(self.F) - 1

    def full_degree(self) -> List[int]:
        """Coefficients of H_n in x (low degree first), length d^n + 1"""
        vector = [0] * (self.top * self.d + 1)
        for i, value in enumerate(self.F):
            vector[i * self.d] = value
        return vector

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "c1": str(self.c1),
            "c2": str(self.c2),
            "F": [str(v) for v in self.F],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClearedIterate":
        return cls(
            d=int(data["d"]),
            n=int(data["n"]),
            c1=int(data["c1"]),
            c2=int(data["c2"]),
            F=tuple(int(v) for v in data["F"]),
        )


@dataclass(frozen=True)
class CriticalOrbit:
    d: int
    c1: int
    c2: int
    terms: Tuple[int, ...]
    # None marks a zero term (0 is periodic); every prime divides 0
    factorizations: Tuple[Optional[Factorization], ...]

    @property
    def zero_indices(self) -> List[int]:
        """1-based indices k with F_0^k = 0"""
        return [k for k, term in enumerate(self.terms, start=1) if term == 0]

    def term(self, k: int) -> int:
        return self.terms[k - 1]

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n": len(self.terms),
            "c1": str(self.c1),
            "c2": str(self.c2),
            "terms": [str(t) for t in self.terms],
            "zero": [t == 0 for t in self.terms],
            "factorizations": [
                None if fac is None else fac.to_dict() for fac in self.factorizations
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CriticalOrbit":
        return cls(
            d=int(data["d"]),
            c1=int(data["c1"]),
            c2=int(data["c2"]),
            terms=tuple(int(t) for t in data["terms"]),
            factorizations=tuple(
                None if fac is None else Factorization.from_dict(fac)
                for fac in data["factorizations"]
            ),
        )


def g_poly(d: int, n: int, max_slots: Optional[int] = None) -> List[int]:
    """
    Coefficients of g_n, where f^n(0) = c + c^d g_n(c)

    Built by g_2 = 1, g_(k+1)(x) = (1 + x^(d-1) g_k(x))^d.

    Args:
        d: Degree, at least 2
        n: Index, at least 2
        max_slots: Size guard override

    Returns:
        List[int]: Coefficients, constant term first; degree d^(n-1) - d
    """
    if n < 2:
        raise InputError(f"g_n is defined for n >= 2, got {n}")
    check_size(d, n, max_slots)
    g = [ZZ(1)]
    for _ in range(n - 2):
        g = dup_pow(dup_add_ground(dup_lshift(g, d - 1, ZZ), ZZ(1), ZZ), d, ZZ)
    return [int(a) for a in reversed(g)]


def cleared_iterate(
    d: int, c1: int, c2: int, n: int, max_slots: Optional[int] = None
) -> ClearedIterate:
    """
    Integer coefficient vector of c2^(d^(n-1)) * f^n(x)

    Args:
        d: Degree
        c1: Numerator of c
        c2: Positive denominator of c, coprime to c1
        n: Iterate index
        max_slots: Size guard override

    Returns:
        ClearedIterate: F[i] is the coefficient of x^(i*d)
    """
    check_coprime(c1, c2)
    slots = check_size(d, n, max_slots)
    # H_1(y) = c2*y + c1 (highest degree first)
    H = [ZZ(c2), ZZ(c1)]
    power = 1  # d^k
    for _ in range(n - 1):
        power *= d
        H = dup_pow(H, d, ZZ)
        H = dup_add_ground(H, ZZ(c1 * c2 ** (power - 1)), ZZ)
    return ClearedIterate(d=d, n=n, c1=c1, c2=c2, F=tuple(_from_dup(H, slots + 1)))


def iterate_coeffs(d: int, c: BigRat, n: int, max_slots: Optional[int] = None) -> IterateTable:
    """
    Exact coefficient table of f^n

    Args:
        d: Degree
        c: The rational constant
        n: Iterate index
        max_slots: Size guard override

    Returns:
        IterateTable: coeffs[i] is the coefficient of x^(i*d)
    """
    c = Fraction(c)
    c1, c2 = split(c)
    cleared = cleared_iterate(d, c1, c2, n, max_slots)
    scale = c2**cleared.top
    return IterateTable(
        d=d, n=n, c=c, coeffs=tuple(Fraction(value, scale) for value in cleared.F)
    )


def cycle_polynomial(
    d: int, c1: int, c2: int, n: int, max_slots: Optional[int] = None
) -> List[int]:
    """
    Coefficients of G^n(x) = c2^(d^(n-1)) * (f^n(x) - x), low degree first

    Every periodic point whose period divides n is a root.
    """
    cleared = cleared_iterate(d, c1, c2, n, max_slots)
    vector = cleared.full_degree()
    vector[1] -= c2**cleared.top
    return vector


def critical_terms(
    d: int, c1: int, c2: int, N: int, max_slots: Optional[int] = None
) -> List[int]:
    """The integers F_0^k = c2^(d^(k-1)) f^k(0) for k = 1..N"""
    check_coprime(c1, c2)
    check_size(d, N, max_slots)
    terms = [c1]
    power = 1
    for _ in range(N - 1):
        power *= d
        terms.append(terms[-1] ** d + c1 * c2 ** (power - 1))
    return terms


def critical_orbit(
    d: int, c1: int, c2: int, N: int, max_slots: Optional[int] = None
) -> CriticalOrbit:
    """
    The cleared orbit of 0 with factorizations

    Args:
        d: Degree
        c1: Numerator of c
        c2: Denominator of c
        N: Number of terms
        max_slots: Size guard override

    Returns:
        CriticalOrbit: Terms F_0^1..F_0^N; zero terms carry no factorization
    """
    if N < 1:
        raise InputError(f"N must be at least 1, got {N}")
    terms = critical_terms(d, c1, c2, N, max_slots)
    factorizations = []
    for k, term in enumerate(terms, start=1):
        if term == 0:
            logger.info(f"F_0^{k} = 0 for c = {c1}/{c2}: 0 is periodic")
            factorizations.append(None)
            continue
        fac = factor(term)
        if not fac.complete:
            logger.warning(f"F_0^{k} for c = {c1}/{c2} is only partially factored")
        factorizations.append(fac)
    return CriticalOrbit(
        d=d, c1=c1, c2=c2, terms=tuple(terms), factorizations=tuple(factorizations)
    )


def apply(d: int, c: BigRat, x: BigRat) -> BigRat:
    return x**d + c


def orbit_eval(d: int, c: BigRat, u: BigRat, steps: int) -> List[BigRat]:
    """[u, f(u), ..., f^steps(u)], computed exactly"""
    if steps < 0:
        raise InputError(f"steps must be non-negative, got {steps}")
    c = Fraction(c)
    orbit = [Fraction(u)]
    for _ in range(steps):
        orbit.append(apply(d, c, orbit[-1]))
    return orbit
