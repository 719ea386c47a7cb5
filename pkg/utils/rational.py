"""Exact rationals, p-adic valuations and integer roots.

Rationals are ``fractions.Fraction`` values: they are always stored in
lowest terms with a positive denominator and zero is ``0/1``, which is the
canonical form every other module relies on (``c = c1/c2``, ``u = u1/u2``).
"""
import re
from fractions import Fraction
from typing import Optional, Tuple, Union

import gmpy2

from utils.errors import InputError

BigRat = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*([+-]?\d+))?\s*$")


def normalize_rational(a: int, b: int) -> BigRat:
    """
    Builds the canonical rational a/b

    Args:
        a: Numerator
        b: Denominator, nonzero

    Returns:
        BigRat: a/b in lowest terms with a positive denominator
    """
    if b == 0:
        raise InputError(f"zero denominator in {a}/{b}")
    return Fraction(int(a), int(b))


def parse_rational(text: Union[str, int, Fraction]) -> BigRat:
    """Parses the text form "a/b" (or a plain integer) into a canonical rational"""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    match = _RATIONAL_RE.match(text.replace("−", "-"))
    if not match:
        raise InputError(f"not a rational of the form a/b: {text!r}")
    num, den = match.group(1), match.group(2)
    return normalize_rational(int(num), int(den) if den is not None else 1)


def format_rational(x: BigRat) -> str:
    # Fraction prints integers without "/1"
    return str(x)


def split(c: BigRat) -> Tuple[int, int]:
    """Returns (c1, c2) with c = c1/c2, c2 > 0, gcd(c1, c2) = 1"""
    return c.numerator, c.denominator


def height(x: BigRat) -> int:
    return max(abs(x.numerator), x.denominator)


def int_valuation(p: int, n: int) -> int:
    """Exponent of p in the nonzero integer n"""
    if n == 0:
        raise InputError("valuation of 0 is infinite")
    if abs(n) % p:
        return 0
    _, count = gmpy2.remove(abs(n), p)
    return int(count)


def valuation(p: int, x: Union[BigRat, int]) -> int:
    """
    p-adic valuation of a nonzero rational

    Args:
        p: A prime
        x: Nonzero rational

    Returns:
        int: nu_p(numerator) - nu_p(denominator)
    """
    # Imported here: utils.factor imports this module
    from utils.factor import is_prime

    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    x = Fraction(x)
    if x == 0:
        raise InputError("valuation of 0 is infinite; handle zero before calling")
    return int_valuation(p, x.numerator) - int_valuation(p, x.denominator)


def perfect_root(n: int, k: int) -> Optional[int]:
    """
    Exact integer k-th root

    Args:
        n: Positive integer
        k: Root index, at least 2

    Returns:
        Optional[int]: r with r**k == n, or None when n is not a k-th power
    """
    if k < 2:
        raise InputError(f"root index must be at least 2, got {k}")
    if n < 1:
        raise InputError(f"perfect_root expects a positive integer, got {n}")
    root, exact = gmpy2.iroot(n, k)
    return int(root) if exact else None


def is_pth_power_rational(x: BigRat, p: int) -> bool:
    """True iff x = y**p for some rational y"""
    x = Fraction(x)
    if p < 2:
        raise InputError(f"exponent must be at least 2, got {p}")
    if x == 0:
        return True
    if x < 0 and p % 2 == 0:
        return False
    return (
        perfect_root(abs(x.numerator), p) is not None
        and perfect_root(x.denominator, p) is not None
    )
