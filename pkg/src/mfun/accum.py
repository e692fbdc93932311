"""Compensated (Neumaier) summation for reproducible accumulation.

Partial sums are merged in a fixed order everywhere in the package, so
results do not depend on chunking or worker count.
"""

from __future__ import annotations

import numpy as np


class KahanSum:
    """Neumaier-compensated scalar sum; works for float or complex."""

    __slots__ = ("s", "c")

    def __init__(self, zero=0.0):
        self.s = zero
        self.c = zero * 0

    def add(self, x) -> None:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def value(self):
        return self.s + self.c


def kahan_total(values) -> complex:
    """Compensated sum of an iterable/array in its given order."""
    acc = KahanSum(0.0 + 0.0j)
    for v in np.asarray(values).ravel():
        acc.add(complex(v))
    return acc.value


def compensated_array_total(arr: np.ndarray) -> complex:
    """Compensated total of a numpy array, vectorized.

    Splits the array into fixed-size chunks, sums each with pairwise
    reduction (np.sum), then merges the chunk totals with Neumaier
    compensation in index order.  Chunk size is a constant, so the
    result is independent of any outer parallelism.
    """
    flat = np.asarray(arr).ravel()
    chunk = 4096
    acc = KahanSum(0.0 + 0.0j)
    for i in range(0, flat.size, chunk):
        acc.add(complex(np.sum(flat[i : i + chunk])))
    return acc.value
