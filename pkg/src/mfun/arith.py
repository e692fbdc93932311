"""Elementary integer arithmetic: sieves, primality, factorization.

Everything here is deterministic and exact; these routines back the
combinatorial index sets and the eigenvalue machinery.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def primes_up_to(n: int) -> list[int]:
    """All primes <= n, by a byte sieve."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond any cap used here."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    for p, e in factorize(n):
        if e > 1:
            return False
    return True


@lru_cache(maxsize=65536)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 as ((p, e), ...), p increasing."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    m = n
    for p in (2, 3, 5):
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    # trial division with 6k+-1 wheel; n stays modest in this package
    f = 7
    step = 4
    while f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            out.append((f, e))
        f += step
        step = 6 - step
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def divisor_count(n: int) -> int:
    out = 1
    for _, e in factorize(n):
        out *= e + 1
    return out


def tau3(n: int) -> int:
    """Number of ordered triples (a, b, c) with a*b*c = n."""
    out = 1
    for _, e in factorize(n):
        out *= (e + 1) * (e + 2) // 2
    return out


class SpfTable:
    """Smallest-prime-factor table, for bulk factorization of 1..n."""

    def __init__(self, n: int):
        self.n = n
        spf = np.arange(n + 1, dtype=np.int64)
        for p in range(2, math.isqrt(n) + 1):
            if spf[p] == p:
                block = spf[p * p :: p]
                np.minimum(block, p, out=block)
        self.spf = spf

    def factorize(self, n: int) -> list[tuple[int, int]]:
        out = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out
