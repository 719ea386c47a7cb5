"""Primitive prime divisors of the critical orbit F_0^1, F_0^2, ..."""
import logging
from math import gcd
from typing import Set

from dynamics.iterates import CriticalOrbit
from dynamics.records import PeriodicPointRecord, PrimitiveCheck, PrimitiveReport
from utils.errors import IncompleteFactorizationError, InputError
from utils.factor import factor_complete

logger = logging.getLogger(__name__)


def primitive_divisors(orbit: CriticalOrbit) -> PrimitiveReport:
    """
    Primitive primes of each term: primes of F_0^k dividing no earlier term

    The report stops at the first zero term, since every prime divides 0.

    Args:
        orbit: The critical orbit with its factorizations

    Returns:
        PrimitiveReport: primitive[k - 1] lists the primitive primes of F_0^k

    Raises:
        IncompleteFactorizationError: A term before the first zero is only
            partially factored
    """
    seen: Set[int] = set()
    table = []
    for k, (term, factorization) in enumerate(zip(orbit.terms, orbit.factorizations), start=1):
        if term == 0:
            note = f"F_0^{k} = 0: 0 is periodic, primitive divisors stop here"
            logger.info(note)
            return PrimitiveReport(primitive=tuple(table), truncated_at=k, note=note)
        if factorization is None or not factorization.complete:
            cofactor = factorization.cofactor if factorization is not None else abs(term)
            raise IncompleteFactorizationError(term, cofactor)
        primes = set(factorization.primes)
        table.append(tuple(sorted(primes - seen)))
        seen |= primes
    return PrimitiveReport(primitive=tuple(table))


def divisibility_check(orbit: CriticalOrbit) -> bool:
    """True iff F_0^m | F_0^n for every pair m | n present (0 divides only 0)"""
    terms = orbit.terms
    for m in range(1, len(terms) + 1):
        a = terms[m - 1]
        for n in range(2 * m, len(terms) + 1, m):
            b = terms[n - 1]
            if a == 0:
                if b != 0:
                    return False
            elif b % a:
                logger.debug(f"F_0^{m} = {a} does not divide F_0^{n} = {b}")
                return False
    return True


def _primes_divide(a: int, b: int) -> bool:
    """True iff every prime of a divides b"""
    a = abs(a)
    if b == 0:
        return True
    g = gcd(a, b)
    while g > 1:
        while a % g == 0:
            a //= g
        g = gcd(a, b)
    return a == 1


def zero_orbit_consistency(orbit: CriticalOrbit) -> bool:
    """
    A prime dividing F_0^m and F_0^k (m < k) also divides F_0^(k-m)

    Pairs with a zero term are skipped.
    """
    terms = orbit.terms
    for k in range(2, len(terms) + 1):
        for m in range(1, k):
            a, b = terms[m - 1], terms[k - 1]
            if a == 0 or b == 0:
                continue
            if not _primes_divide(gcd(a, b), terms[k - m - 1]):
                logger.debug(f"a prime of F_0^{m} and F_0^{k} misses F_0^{k - m}")
                return False
    return True


def periodic_primitive_check(rec: PeriodicPointRecord, orbit: CriticalOrbit) -> PrimitiveCheck:
    """
    Checks a cycle against the primitive-prime theorems

    (a) every prime of every cycle numerator is primitive in F_0^n,
    (b) F_0^n has at least n - 1 primitive primes,
    (c) the critical orbit is consistent under index differences.

    Args:
        rec: A cycle of exact period n
        orbit: Critical orbit of the same c covering indices 1..n

    Returns:
        PrimitiveCheck: The flags; skipped (n = 1) or vacuous (zero terms) cases carry a note
    """
    n = rec.n
    if n < 2:
        return PrimitiveCheck(n=n, note="skipped: the theorem needs period n > 1")
    if len(orbit.terms) < n:
        raise InputError(f"critical orbit has {len(orbit.terms)} terms, period {n} needs {n}")

    window = CriticalOrbit(
        d=orbit.d, c1=orbit.c1, c2=orbit.c2,
        terms=orbit.terms[:n], factorizations=orbit.factorizations[:n],
    )
    zero_at = window.zero_indices
    if zero_at:
        report = primitive_divisors(window)
        return PrimitiveCheck(
            n=n, report=report, zero_orbit=zero_orbit_consistency(window),
            note=f"vacuous: F_0^{zero_at[0]} = 0",
        )

    report = primitive_divisors(window)
    primitive_n = set(report.at(n))
    u1_primes: Set[int] = set()
    for u1 in rec.u1_list:
        if u1 != 0:
            u1_primes |= set(factor_complete(u1).primes)
    result = PrimitiveCheck(
        n=n,
        report=report,
        thm_primes_of_u1=u1_primes <= primitive_n,
        count_bound=len(primitive_n) >= n - 1,
        zero_orbit=zero_orbit_consistency(window),
    )
    if result.thm_primes_of_u1 is False or result.count_bound is False:
        logger.error(f"primitive-prime check failed for the cycle of {rec.u}")
    return result


def ratio_term(a: int, b: int, m: int) -> int:
    """b(m) = (a^m - b^m) / (a - b)"""
    if a == b:
        raise InputError("ratio terms need a != b")
    if m < 0:
        raise InputError(f"m must be non-negative, got {m}")
    return (a**m - b**m) // (a - b)


def ratio_gcd_property(a: int, b: int, k: int, l: int) -> bool:
    """gcd(b(k), b(l)) = b(gcd(k, l)) for coprime a != b, up to sign"""
    if a == b or gcd(a, b) != 1:
        raise InputError(f"ratio_gcd_property needs coprime a != b, got ({a}, {b})")
    if k < 1 or l < 1:
        raise InputError("k and l must be positive")
    return gcd(ratio_term(a, b, k), ratio_term(a, b, l)) == abs(ratio_term(a, b, gcd(k, l)))
