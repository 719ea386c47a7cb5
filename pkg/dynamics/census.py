"""Height-bounded experiments: density of d-th-power denominators and the periodic census."""
import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd, pi, prod
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from dynamics.periodic import find_periodic, numerator_bound
from dynamics.records import CensusFailure, CensusFinding, CensusReport, HeightCounts
from utils.config import settings
from utils.errors import BudgetExceededError, DynamicsError, InputError
from utils.factor import factor_complete, primes_up_to
from utils.rational import BigRat, height, perfect_root

logger = logging.getLogger(__name__)

VARIANTS = ("reduced", "pairs")


@lru_cache(maxsize=4)
def totient_sieve(N: int) -> np.ndarray:
    """phi(0..N) as an int64 array"""
    phi = np.arange(N + 1, dtype=np.int64)
    for p in primes_up_to(N):
        phi[p::p] -= phi[p::p] // p
    return phi


def count_reduced(N: int) -> int:
    """|S(N)|: reduced a/b with h(a/b) <= N, including 0"""
    positive = 2 * int(totient_sieve(N)[1:].sum()) - 1
    return 1 + 2 * positive


def _coprime_count(N: int, primes: Sequence[int]) -> int:
    """#{1 <= a <= N : gcd(a, prod(primes)) = 1}, by inclusion-exclusion"""
    total = 0
    for k in range(len(primes) + 1):
        for subset in combinations(primes, k):
            total += (-1) ** k * (N // prod(subset))
    return total


def dth_power_denominators(N: int, d: int) -> List[int]:
    """The bases b >= 1 with b^d <= N"""
    bases = []
    b = 1
    while b**d <= N:
        bases.append(b)
        b += 1
    return bases


def count_heights(N: int, d: int, variant: str = "pairs") -> HeightCounts:
    """
    Exact |S(N)| and |S_d(N)| with the density prediction

    Args:
        N: Height bound
        d: Degree
        variant: "reduced" counts coprime numerators per d-th-power
            denominator; "pairs" counts every numerator |a| <= N

    Returns:
        HeightCounts: both counts, their ratio and pi^2 / (6 N^((d-1)/d))
    """
    if N < 1:
        raise InputError(f"N must be at least 1, got {N}")
    if d < 2:
        raise InputError(f"degree d must be at least 2, got {d}")
    if variant not in VARIANTS:
        raise InputError(f"variant must be one of {VARIANTS}, got {variant!r}")

    s_count = count_reduced(N)
    sd_count = 0
    for b in dth_power_denominators(N, d):
        if variant == "pairs":
            sd_count += 2 * N + 1
        elif b == 1:
            sd_count += 2 * N + 1
        else:
            sd_count += 2 * _coprime_count(N, factor_complete(b).primes)
    predicted = pi**2 / (6 * N ** ((d - 1) / d))
    logger.debug(f"N={N}, d={d}, {variant}: |S|={s_count}, |S_d|={sd_count}")
    return HeightCounts(
        N=N, d=d, variant=variant, s_count=s_count, sd_count=sd_count,
        ratio=Fraction(sd_count, s_count), predicted=predicted,
    )


def density_trend(d: int, Ns: Iterable[int], variant: str = "pairs") -> List[HeightCounts]:
    return [count_heights(N, d, variant) for N in Ns]


def gated_constants(d: int, N: int) -> List[BigRat]:
    """Reduced c with h(c) <= N whose denominator is a d-th power, ordered by (h(c), c)"""
    values = []
    for b in dth_power_denominators(N, d):
        beta = b**d
        for alpha in range(-N, N + 1):
            if gcd(alpha, beta) == 1:
                values.append(Fraction(alpha, beta))
    return sorted(values, key=lambda c: (height(c), c))


def census_volume(d: int, constants: Sequence[BigRat], n_max: int) -> int:
    """Candidate numerators the sweep may have to test"""
    total = 0
    for c in constants:
        u2 = perfect_root(c.denominator, d) if c.denominator > 1 else 1
        total += 2 * numerator_bound(d, c.numerator, u2) + 1
    return total * n_max


def _survey(args: Tuple[int, BigRat, int]) -> Tuple[List[CensusFinding], List[CensusFailure]]:
    """All cycles of x^d + c with period <= n_max; runs in worker processes"""
    d, c, n_max = args
    findings, failures = [], []
    for n in range(1, n_max + 1):
        try:
            for record in find_periodic(d, c, n):
                findings.append(CensusFinding(c=c, record=record))
        except DynamicsError as e:
            logger.error(f"census entry c = {c}, n = {n} failed: {e}")
            failures.append(CensusFailure(c=c, n=n, message=str(e)))
    return findings, failures


def periodic_census(
    d: int,
    N: int,
    n_max: int,
    workers: Optional[int] = None,
    max_volume: Optional[int] = None,
) -> CensusReport:
    """
    Every rational cycle of period <= n_max for c of height <= N

    Constants failing the denominator gate have no periodic points and are
    only counted. Failures of individual searches are recorded in the report
    and do not stop the sweep.

    Args:
        d: Degree
        N: Height bound
        n_max: Largest period
        workers: Process count (settings.census_workers)
        max_volume: Budget cap (settings.census_max_volume)

    Returns:
        CensusReport: Counts, ratios and every finding sorted by (h(c), c)
    """
    if N < 1 or n_max < 1:
        raise InputError(f"N and n_max must be at least 1, got N={N}, n_max={n_max}")
    workers = settings.census_workers if workers is None else workers
    max_volume = settings.census_max_volume if max_volume is None else max_volume

    constants = gated_constants(d, N)
    volume = census_volume(d, constants, n_max)
    if volume > max_volume:
        logger.warning(f"census refused: volume {volume} > cap {max_volume}")
        raise BudgetExceededError(volume, max_volume)

    logger.info(f"census d={d}, N={N}, n_max={n_max}: {len(constants)} gated constants")
    tasks = [(d, c, n_max) for c in constants]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_survey, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_survey(task) for task in tasks]

    findings: List[CensusFinding] = []
    failures: List[CensusFailure] = []
    for found, failed in results:
        findings.extend(found)
        failures.extend(failed)
    findings.sort(key=lambda f: (height(f.c), f.c, f.record.n, f.record.u))
    failures.sort(key=lambda f: (height(f.c), f.c, f.n))

    reduced = count_heights(N, d, "reduced")
    pairs = count_heights(N, d, "pairs")
    pd_count = len({f.c for f in findings})
    logger.info(
        f"census done: {len(findings)} cycles over {pd_count} constants, {len(failures)} failures"
    )
    return CensusReport(
        d=d,
        N=N,
        n_max=n_max,
        s_count=reduced.s_count,
        sd_reduced=reduced.sd_count,
        sd_pairs=pairs.sd_count,
        p_count=reduced.s_count,
        pd_count=pd_count,
        predicted=reduced.predicted,
        findings=tuple(findings),
        failures=tuple(failures),
    )
