"""Primality, integer factorization and exact-divisor enumeration."""
import logging
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Tuple

import gmpy2
import numpy as np

from utils.config import settings
from utils.errors import IncompleteFactorizationError, InputError

logger = logging.getLogger(__name__)

# Strong probable-prime tests with these bases are deterministic below this bound
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981

# Trial division checks the cofactor for primality after these small primes
_EARLY_PRIME_CHECK = 4096


@lru_cache(maxsize=8)
def primes_up_to(limit: int) -> Tuple[int, ...]:
    """All primes p <= limit, by a numpy sieve of Eratosthenes"""
    if limit < 2:
        return ()
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(limit**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return tuple(int(p) for p in np.flatnonzero(sieve))


def _strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = gmpy2.powmod(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = gmpy2.powmod(x, 2, n)
        if x == n - 1:
            return True
    return False


def is_prime(n: int, rounds: Optional[int] = None) -> bool:
    """
    Primality certification

    Deterministic for n < 3.3e24 (strong tests to the first 13 prime bases).
    Above that, `rounds` extra strong tests with pseudo-random bases are run;
    a composite survives with probability below 4**(-rounds).

    Args:
        n: Integer to test
        rounds: Randomized rounds above the deterministic range

    Returns:
        bool: True if n is (certified or overwhelmingly likely) prime
    """
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if not all(_strong_probable_prime(n, a) for a in _MR_BASES):
        return False
    if n < _MR_DETERMINISTIC_LIMIT:
        return True
    # Seeded by n so repeated calls agree
    rng = random.Random(n)
    rounds = settings.primality_rounds if rounds is None else rounds
    return all(_strong_probable_prime(n, rng.randrange(2, n - 1)) for _ in range(rounds))


def brent_rho(n: int, c: int, max_iterations: int, seed: int = 2) -> Optional[int]:
    """
    Pollard's rho with Brent's cycle detection and batched gcds

    Args:
        n: Odd composite to split
        c: Constant of the polynomial x^2 + c
        max_iterations: Iteration cap
        seed: Starting value

    Returns:
        Optional[int]: A nontrivial factor of n, or None when the cap is hit
    """
    if n % 2 == 0:
        return 2
    batch = 128
    y, r, q, g = seed, 1, 1, 1
    x = ys = y
    iterations = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (gmpy2.powmod(y, 2, n) + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(batch, r - k)):
                y = (gmpy2.powmod(y, 2, n) + c) % n
                q = q * abs(x - y) % n
            g = gmpy2.gcd(q, n)
            k += batch
        iterations += 2 * r
        r *= 2
        if g == 1 and iterations > max_iterations:
            return None
    if g == n:
        # The batch overshot: replay one step at a time
        while True:
            ys = (gmpy2.powmod(ys, 2, n) + c) % n
            g = gmpy2.gcd(abs(x - ys), n)
            if g > 1:
                break
    if g == n:
        return None
    return int(g)


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: Tuple[Tuple[int, int], ...] = ()
    complete: bool = True
    cofactor: int = 1
    # Set when only primes <= prime_bound were searched; the cofactor then has
    # no prime factor <= prime_bound
    prime_bound: Optional[int] = None

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def value(self) -> int:
        """sign * prod p^e * cofactor, equal to the factored input"""
        result = self.sign * self.cofactor
        for p, e in self.factors:
            result *= p**e
        return result

    def as_dict(self) -> Dict[int, int]:
        return dict(self.factors)

    def to_dict(self) -> dict:
        return {
            "sign": self.sign,
            "factors": [[str(p), e] for p, e in self.factors],
            "complete": self.complete,
            "cofactor": str(self.cofactor),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Factorization":
        return cls(
            sign=int(data["sign"]),
            factors=tuple((int(p), int(e)) for p, e in data["factors"]),
            complete=bool(data["complete"]),
            cofactor=int(data.get("cofactor", "1")),
        )

    def __str__(self) -> str:
        if self.sign == 0:
            return "0"
        parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors]
        if self.cofactor != 1:
            parts.append(f"[{self.cofactor}]")
        body = "*".join(parts) or "1"
        return f"-{body}" if self.sign < 0 else body


def _split_composite(
    n: int, rho_iterations: int, rho_attempts: int
) -> Tuple[Dict[int, int], int]:
    """Splits n (no small factors) into primes; returns (primes, unfactored part)"""
    found: Dict[int, int] = {}
    leftover = 1
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        # Perfect powers defeat rho
        split_power = False
        for k in range(2, m.bit_length() + 1):
            root, exact = gmpy2.iroot(m, k)
            if exact:
                stack.extend([int(root)] * k)
                split_power = True
                break
            if root < 2:
                break
        if split_power:
            continue
        divisor = None
        for c in range(1, rho_attempts + 1):
            divisor = brent_rho(m, c, rho_iterations)
            if divisor:
                break
        if divisor is None:
            logger.warning(f"Rho budget exhausted on a {m.bit_length()}-bit cofactor")
            leftover *= m
            continue
        stack.extend([divisor, m // divisor])
    return found, leftover


@lru_cache(maxsize=4096)
def _factor_abs(
    n: int, trial_limit: int, rho_iterations: int, rho_attempts: int, prime_bound: Optional[int]
) -> Factorization:
    found: Dict[int, int] = {}
    m = n
    limit = trial_limit if prime_bound is None else min(trial_limit, prime_bound)

    # Trial division
    below_sqrt = False
    for i, p in enumerate(primes_up_to(trial_limit)):
        if p > limit:
            break
        if p * p > m:
            below_sqrt = True
            break
        if m % p == 0:
            m, count = gmpy2.remove(m, p)
            m = int(m)
            found[p] = int(count)
        if i == _EARLY_PRIME_CHECK and m > 1 and is_prime(m):
            below_sqrt = True
            break
    if m > 1 and (below_sqrt or is_prime(m)):
        found[m] = found.get(m, 0) + 1
        m = 1

    if m > 1 and prime_bound is not None and prime_bound <= trial_limit:
        # Every remaining prime exceeds prime_bound
        return Factorization(
            sign=1, factors=tuple(sorted(found.items())), complete=False,
            cofactor=m, prime_bound=prime_bound,
        )

    leftover = 1
    if m > 1:
        more, leftover = _split_composite(m, rho_iterations, rho_attempts)
        for p, e in more.items():
            found[p] = found.get(p, 0) + e

    return Factorization(
        sign=1,
        factors=tuple(sorted(found.items())),
        complete=leftover == 1,
        cofactor=leftover,
        prime_bound=None,
    )


def factor(
    n: int,
    *,
    prime_bound: Optional[int] = None,
    trial_limit: Optional[int] = None,
    rho_iterations: Optional[int] = None,
    rho_attempts: Optional[int] = None,
) -> Factorization:
    """
    Factors an integer into certified primes

    Trial division runs up to the trial limit, then Brent's rho splits the
    remaining cofactor. If the rho budget runs out the result is returned
    with complete=False and the unfactored cofactor, never silently.

    With `prime_bound` only primes up to that bound are searched; when the
    bound is within the trial limit the result lists every prime <= bound
    with its exact exponent and leaves a cofactor free of such primes.

    Args:
        n: Integer to factor
        prime_bound: Optional bound on the primes of interest
        trial_limit: Trial division prime bound (settings.factor_trial_limit)
        rho_iterations: Iteration cap per rho attempt
        rho_attempts: Number of rho polynomials tried

    Returns:
        Factorization: sign, ascending (prime, exponent) pairs, completeness flag
    """
    n = int(n)
    if n == 0:
        return Factorization(sign=0)
    sign = 1 if n > 0 else -1
    result = _factor_abs(
        abs(n),
        settings.factor_trial_limit if trial_limit is None else trial_limit,
        settings.factor_rho_iterations if rho_iterations is None else rho_iterations,
        settings.factor_rho_attempts if rho_attempts is None else rho_attempts,
        prime_bound,
    )
    if not result.complete and result.prime_bound is None:
        logger.warning(f"Incomplete factorization of {n}: cofactor {result.cofactor}")
    return Factorization(
        sign=sign,
        factors=result.factors,
        complete=result.complete,
        cofactor=result.cofactor,
        prime_bound=result.prime_bound,
    )


def factor_complete(n: int, **kwargs) -> Factorization:
    """Like factor, but raises IncompleteFactorizationError instead of returning a partial result"""
    result = factor(n, **kwargs)
    if not result.complete:
        raise IncompleteFactorizationError(n, result.cofactor)
    return result


def exact_divisors(F: Factorization, limit: Optional[int] = None) -> List[int]:
    """
    Signed exact divisors of a factored integer

    Returns every v = +-prod_{p in S} p^{nu_p(F)} over subsets S of the primes
    of F, ordered by absolute value, negative first.

    Args:
        F: A complete factorization, or one searched up to a prime bound
        limit: Keep only |v| <= limit. Required (and at most F.prime_bound)
            when F is bounded rather than complete

    Returns:
        List[int]: The divisors
    """
    if F.sign == 0:
        raise InputError("every integer divides 0; exact divisors of 0 are undefined")
    if not F.complete:
        if F.prime_bound is None or limit is None or limit > F.prime_bound:
            raise InputError("exact divisors need a complete factorization")
    powers = [p**e for p, e in F.factors]
    values = []
    for mask in product((False, True), repeat=len(powers)):
        v = 1
        for take, pe in zip(mask, powers):
            if take:
                v *= pe
                if limit is not None and v > limit:
                    break
        if limit is not None and v > limit:
            continue
        values.extend((-v, v))
    return sorted(values, key=lambda v: (abs(v), v))
