"""Dirichlet characters of prime modulus.

The full group of characters mod a prime m is cyclic of order m-1; each
character is addressed by an index j, with j = 0 the principal one.
Values are roots of unity read from one precomputed table, so repeated
evaluations are bit-reproducible.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .arith import factorize, is_prime

MODULUS_CAP = 10**5


class CharacterGroup:
    """All Dirichlet characters mod a prime m, via a discrete-log table."""

    def __init__(self, modulus: int):
        if modulus > MODULUS_CAP:
            raise ValueError(f"modulus {modulus} exceeds cap {MODULUS_CAP}")
        if modulus < 3 or not is_prime(modulus):
            raise ValueError(f"modulus must be an odd prime >= 3, got {modulus}")
        self.modulus = modulus
        self.order = modulus - 1
        self.generator = _least_primitive_root(modulus)
        dlog = np.zeros(modulus, dtype=np.int64)
        acc = 1
        for k in range(self.order):
            dlog[acc] = k
            acc = acc * self.generator % modulus
        self.dlog = dlog
        # single root-of-unity table shared by every evaluation
        self.roots = np.exp(2j * np.pi * np.arange(self.order) / self.order)

    def __repr__(self):
        return f"CharacterGroup(modulus={self.modulus}, generator={self.generator})"

    def check_index(self, j: int) -> int:
        if not 0 <= j < self.order:
            raise ValueError(f"character index {j} outside [0, {self.order - 1}]")
        return j


def _least_primitive_root(m: int) -> int:
    cofactors = [(m - 1) // q for q, _ in factorize(m - 1)]
    for g in range(2, m):
        if all(pow(g, c, m) != 1 for c in cofactors):
            return g
    raise AssertionError(f"no primitive root found for {m}")  # m prime: unreachable


def build_group(m: int) -> CharacterGroup:
    return CharacterGroup(m)


def chi_eval(group: CharacterGroup, j: int, n: int) -> complex:
    """chi_j(n): zero on multiples of m, else the root of unity exp(2 pi i j dlog(n)/(m-1))."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    group.check_index(j)
    r = n % group.modulus
    if r == 0:
        return 0j
    return complex(group.roots[(j * int(group.dlog[r])) % group.order])


def chi_vector(group: CharacterGroup, n: int) -> np.ndarray:
    """chi_j(n) for every j in [0, m-2] at once."""
    r = n % group.modulus
    if r == 0:
        return np.zeros(group.order, dtype=np.complex128)
    d = int(group.dlog[r])
    idx = (np.arange(group.order, dtype=np.int64) * d) % group.order
    return group.roots[idx]


def chi_value_table(group: CharacterGroup, j: int, n_max: int) -> np.ndarray:
    """chi_j(n) for n = 0..n_max (index 0 unused, set to 0)."""
    group.check_index(j)
    m = group.modulus
    residue_vals = np.zeros(m, dtype=np.complex128)
    residue_vals[1:] = group.roots[(j * group.dlog[1:]) % group.order]
    reps = np.arange(n_max + 1) % m
    out = residue_vals[reps]
    out[0] = 0
    return out
