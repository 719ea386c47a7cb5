"""Rational periodic points of x^d + c: search, exact periods, exclusion filters.

A periodic point u = u1/u2 of x^d + c1/c2 must satisfy c2 = u2^d, all points
of a cycle share u2, and (period n) u1 is an exact divisor of F_0^n. Every
periodic point also lies within the escape radius 1 + |c|, which bounds the
numerators that need to be considered.
"""
import logging
from dataclasses import replace
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Dict, List, Optional, Sequence

from sympy.ntheory import n_order

from dynamics.iterates import apply, check_size, critical_terms, cycle_polynomial
from dynamics.records import CheckMap, ExclusionVerdict, PeriodicPointRecord
from utils.config import settings
from utils.errors import (IncompleteFactorizationError, InputError, NotPeriodicError,
                          SizeGuardError)
from utils.factor import exact_divisors, factor, is_prime
from utils.rational import BigRat, perfect_root, split

logger = logging.getLogger(__name__)


def denominator_gate(d: int, c: BigRat) -> Optional[int]:
    """u2 = c2^(1/d) when c2 is a d-th power; None means no periodic points at all"""
    _, c2 = split(Fraction(c))
    if c2 == 1:
        return 1
    return perfect_root(c2, d)


def escape_radius(c: BigRat) -> BigRat:
    """R = 1 + |c|: once |x| > R the orbit grows strictly"""
    return 1 + abs(Fraction(c))


def numerator_bound(d: int, c1: int, u2: int) -> int:
    """floor(u2 * R), the largest |u1| a periodic point u1/u2 can have"""
    return u2 + abs(c1) // u2 ** (d - 1)


def proper_divisors(n: int) -> List[int]:
    return [m for m in range(1, n) if n % m == 0]


def _cycle_of(d: int, c: BigRat, u: BigRat, n: int, radius: BigRat) -> Optional[List[BigRat]]:
    """[u, f(u), ..., f^(n-1)(u)] if f^n(u) = u, else None"""
    orbit = [u]
    x = u
    for _ in range(n):
        x = apply(d, c, x)
        if abs(x) > radius:
            return None
        orbit.append(x)
    if orbit[-1] != u:
        return None
    return orbit[:-1]


def exact_period(d: int, c: BigRat, u: BigRat, n_cap: int) -> Optional[int]:
    """
    Least n <= n_cap with f^n(u) = u

    Args:
        d: Degree
        c: The rational constant
        u: Starting point
        n_cap: Largest period to try

    Returns:
        Optional[int]: The exact period, or None when u does not return in time
    """
    if n_cap < 1:
        raise InputError(f"n_cap must be at least 1, got {n_cap}")
    c, u = Fraction(c), Fraction(u)
    radius = escape_radius(c)
    if abs(u) > radius:
        return None
    x = u
    for k in range(1, n_cap + 1):
        x = apply(d, c, x)
        if x == u:
            return k
        if abs(x) > radius:
            return None
    return None


def conjugated_orbit(d: int, c1: int, u2: int, u1: int, steps: int) -> List[int]:
    """
    Integer orbit of u1 under x -> (x^d + c1) / u2^(d-1)

    This map is conjugate to f by x -> x/u2, so every division is exact for a
    periodic point u1/u2.

    Raises:
        NotPeriodicError: A division left a remainder
    """
    modulus = u2 ** (d - 1)
    orbit = [u1]
    x = u1
    for step in range(steps):
        x, remainder = divmod(x**d + c1, modulus)
        if remainder:
            raise NotPeriodicError(
                f"{u1}/{u2} is not periodic: step {step + 1} is not divisible by {modulus}"
            )
        orbit.append(x)
    return orbit


def _candidates(d: int, c1: int, c2: int, u2: int, n: int, F0: int) -> Sequence[int]:
    bound = numerator_bound(d, c1, u2)
    if F0 == 0:
        # 0 is periodic and the numerator divisibility is empty: scan the radius
        logger.info(f"F_0^{n} = 0 for c = {c1}/{c2}; scanning |u1| <= {bound}")
        return range(-bound, bound + 1)

    if bound <= settings.factor_trial_limit:
        factorization = factor(F0, prime_bound=bound)
    else:
        factorization = factor(F0)
        if not factorization.complete:
            raise IncompleteFactorizationError(
                F0, factorization.cofactor,
                f"cannot list the candidates of period {n}: F_0 is not fully factored",
            )
    divisors = exact_divisors(factorization, limit=bound)

    N = d**n - 1
    survivors = []
    for u1 in divisors:
        if gcd(u1, u2) != 1:
            continue
        if n >= 2 and c1 != 0:
            if gcd(u1, c1) != 1:
                continue
            m = abs(c1)
            if (pow(u1, N, m) - pow(u2, N, m)) % m:
                continue
        survivors.append(u1)
    logger.debug(
        f"period {n}, c = {c1}/{c2}: {len(divisors)} exact divisors, {len(survivors)} survive"
    )
    return survivors


def find_periodic(d: int, c: BigRat, n: int) -> List[PeriodicPointRecord]:
    """
    Complete list of rational cycles of exact period n

    Args:
        d: Degree, at least 2
        c: The rational constant
        n: Exact period, at least 1

    Returns:
        List[PeriodicPointRecord]: One record per cycle, sorted by leading point

    Raises:
        IncompleteFactorizationError: F_0^n could not be factored far enough
            to list every candidate numerator
    """
    if n < 1:
        raise InputError(f"period n must be at least 1, got {n}")
    check_size(d, n)
    c = Fraction(c)
    c1, c2 = split(c)
    u2 = denominator_gate(d, c)
    if u2 is None:
        logger.debug(f"c2 = {c2} is not a {d}-th power: no periodic points")
        return []

    F0 = critical_terms(d, c1, c2, n)[-1]
    radius = escape_radius(c)
    periodic: Dict[BigRat, List[BigRat]] = {}
    for u1 in _candidates(d, c1, c2, u2, n, F0):
        u = Fraction(u1, u2)
        if u.denominator != u2:
            continue
        cycle = _cycle_of(d, c, u, n, radius)
        if cycle is None:
            continue
        if any(cycle[m % n] == u for m in proper_divisors(n)):
            continue
        periodic[u] = cycle

    # Group points into cycles, smallest point first
    records = []
    seen = set()
    for u in sorted(periodic):
        if u in seen:
            continue
        cycle = periodic[u]
        if not all(x in periodic for x in cycle):
            logger.error(f"cycle of {u} at c = {c} left the candidate set")
        seen.update(cycle)
        start = cycle.index(min(cycle))
        cycle = cycle[start:] + cycle[:start]
        record = PeriodicPointRecord(
            u=cycle[0], n=n, orbit=tuple(cycle), u1_list=tuple(x.numerator for x in cycle)
        )
        records.append(replace(record, checks=structural_checks(record, d, c)))

    records.sort(key=lambda rec: rec.u)
    logger.info(f"x^{d} + {c}: {len(records)} cycle(s) of exact period {n}")
    return records


def _is_exact_divisor(u1: int, F0: int) -> bool:
    """u1 || F0: every prime of u1 divides F0 to exactly the same power"""
    if F0 % u1:
        return False
    cofactor = F0 // u1
    return gcd(u1, cofactor) == 1


def _cycle_polynomial_check(d: int, c1: int, c2: int, rec: PeriodicPointRecord) -> Optional[bool]:
    """Every cycle member is a root of G^n; None when G^n is past the size guard"""
    try:
        G = cycle_polynomial(d, c1, c2, rec.n)
    except SizeGuardError:
        return None
    for u in rec.orbit:
        value = Fraction(0)
        for coefficient in reversed(G):
            value = value * u + coefficient
        if value != 0:
            return False
    return True


def structural_checks(rec: PeriodicPointRecord, d: int, c: BigRat) -> CheckMap:
    """
    Re-verifies the structure theorems on one cycle

    Checks that do not apply (n = 1, c1 = 0, F_0 = 0) are recorded as None.
    Nothing here raises on a failed check; a False value is the result.

    Args:
        rec: A cycle found by find_periodic
        d: Degree
        c: The rational constant

    Returns:
        CheckMap: check name -> True, False or None
    """
    c = Fraction(c)
    c1, c2 = split(c)
    n = rec.n
    u2 = rec.u2
    u1s = list(rec.u1_list)
    N = d**n - 1
    F0 = critical_terms(d, c1, c2, n)[-1]
    lemma_applies = n >= 2 and c1 != 0

    checks: CheckMap = {
        "denominator": c2 == u2**d,
        "shared_denominator": all(x.denominator == u2 for x in rec.orbit),
    }

    if F0 == 0:
        checks["exact_divisor"] = None
    else:
        checks["exact_divisor"] = all(_is_exact_divisor(u1, F0) for u1 in u1s if u1 != 0)

    if lemma_applies:
        checks["coprime_c1"] = all(gcd(u1, c1) == 1 for u1 in u1s)
        m = abs(c1)
        checks["c1_divides_power_difference"] = all(
            (pow(u1, N, m) - pow(u2, N, m)) % m == 0 for u1 in u1s
        )
    else:
        checks["coprime_c1"] = None
        checks["c1_divides_power_difference"] = None

    checks["pairwise_coprime"] = (
        all(gcd(a, b) == 1 for a, b in combinations(u1s, 2)) if n >= 2 else None
    )

    # Primes of c1 prime to d^n - 1 separate the numerators
    primes = []
    if lemma_applies:
        primes = [p for p in factor(c1).primes if gcd(p, N) == 1]
    if primes:
        separation = True
        orders = True
        for p in primes:
            for a, b in combinations(u1s, 2):
                if (a - b) % p == 0 or (pow(a, N, p) - pow(b, N, p)) % p:
                    separation = False
                if a % p == 0 or b % p == 0:
                    orders = False
                    continue
                for x, y in ((a, b), (b, a)):
                    order = n_order(x * pow(y, -1, p) % p, p)
                    if gcd(p - 1, N) % order or order == 1:
                        orders = False
        checks["prime_separation"] = separation
        checks["ratio_order"] = orders
    else:
        checks["prime_separation"] = None
        checks["ratio_order"] = None

    if c1 != 0 and F0 != 0:
        checks["quotient_coprime"] = gcd(F0 // c1, c1) == 1
    else:
        checks["quotient_coprime"] = None

    checks["cycle_polynomial"] = _cycle_polynomial_check(d, c1, c2, rec)

    failed = [name for name, value in checks.items() if value is False]
    if failed:
        logger.error(f"structural checks failed for {rec.u} at c = {c}: {failed}")
    return checks


def exclusion_filter(d: int, c1: int, n: int) -> ExclusionVerdict:
    """
    Rules out period n using the primes of c1

    For n >= 2, a prime p | c1 with gcd(p, d^n - 1) = 1 and
    gcd(p - 1, d^n - 1) = 1 forbids cycles of exact period n; so does
    p != 1 mod d^n - 1 when d^n - 1 is prime. Only certified primes are used:
    an incomplete factorization can still prove impossibility, but is flagged.

    Args:
        d: Degree
        c1: Nonzero numerator of c
        n: Period

    Returns:
        ExclusionVerdict: impossible(p) or inconclusive, with the per-prime trace
    """
    if c1 == 0:
        raise InputError("the exclusion filter needs c1 != 0")
    if n < 1:
        raise InputError(f"period n must be at least 1, got {n}")
    if d < 2:
        raise InputError(f"degree d must be at least 2, got {d}")
    N = d**n - 1
    factorization = factor(c1)
    incomplete = not factorization.complete
    if incomplete:
        logger.warning(f"c1 = {c1} is only partially factored; using certified primes")
    trace = tuple((p, gcd(p, N), gcd(p - 1, N)) for p in factorization.primes)

    if n == 1:
        # The coprimality argument needs two distinct cycle points; x^2 + 2/9
        # has the rational fixed points 1/3 and 2/3 although p = 2 excludes n >= 2
        return ExclusionVerdict(
            "inconclusive", trace=trace, incomplete=incomplete,
            note="the filter only applies to periods n >= 2",
        )

    N_prime = is_prime(N)
    for p, g, h in trace:
        if g == 1 and h == 1:
            logger.debug(f"p = {p} excludes period {n}")
            return ExclusionVerdict("impossible", p=p, trace=trace, incomplete=incomplete)
        if N_prime and g == 1 and p % N != 1:
            return ExclusionVerdict("impossible", p=p, trace=trace, incomplete=incomplete)
    return ExclusionVerdict("inconclusive", trace=trace, incomplete=incomplete)
