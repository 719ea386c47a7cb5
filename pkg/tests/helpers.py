"""Independent oracles shared by the test modules."""
from fractions import Fraction
from math import gcd

from sympy import integer_nthroot


def reduced_constants(max_height: int):
    """Every reduced c with h(c) <= max_height"""
    values = set()
    for b in range(1, max_height + 1):
        for a in range(-max_height, max_height + 1):
            if gcd(a, b) == 1:
                values.add(Fraction(a, b))
    return sorted(values)


def divisors(m: int):
    """Positive divisors of m != 0 by trial division"""
    m = abs(m)
    small, large = [], []
    i = 1
    while i * i <= m:
        if m % i == 0:
            small.append(i)
            if i * i != m:
                large.append(m // i)
        i += 1
    return small + large[::-1]


def brute_force_cycles(d: int, c: Fraction, n: int):
    """
    Cycles of exact period n found by direct iteration

    Tests every u1/u2 where u2^d = c2 and u1 divides F_0 = c2^(d^(n-1)) f^n(0),
    with |u1| <= max(|F_0|, 1).
    """
    c = Fraction(c)
    u2, exact = integer_nthroot(c.denominator, d)
    if not exact:
        return set()
    x = Fraction(0)
    for _ in range(n):
        x = x**d + c
    F0 = x * c.denominator ** (d ** (n - 1))
    assert F0.denominator == 1
    F0 = int(F0)
    if F0 == 0:
        candidates = range(-1, 2)
    else:
        candidates = [s * m for m in divisors(F0) for s in (1, -1)]

    cycles = set()
    for u1 in candidates:
        u = Fraction(u1, u2)
        if u.denominator != u2:
            continue
        orbit = [u]
        x = u
        for _ in range(n):
            x = x**d + c
            orbit.append(x)
        if orbit[n] != u or any(orbit[m] == u for m in range(1, n)):
            continue
        cycles.add(frozenset(orbit[:n]))
    return cycles


def cycle_sets(records):
    return {frozenset(rec.orbit) for rec in records}


def naive_iterate(d: int, c: Fraction, n: int):
    """Coefficients of f^n (constant term first) by repeated substitution"""
    result = [Fraction(0), Fraction(1)]
    for _ in range(n):
        # result <- result^d + c
        power = [Fraction(1)]
        for _ in range(d):
            product = [Fraction(0)] * (len(power) + len(result) - 1)
            for i, a in enumerate(power):
                if a:
                    for j, b in enumerate(result):
                        product[i + j] += a * b
            power = product
        power[0] += c
        result = power
    return result
