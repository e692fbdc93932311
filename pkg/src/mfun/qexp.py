"""Exact integer q-expansions of eta products.

The discriminant form is q * prod(1-q^n)^24 and the level-11 weight-2
form is q * prod(1-q^n)^2 (1-q^{11n})^2.  Coefficients are computed
exactly: the 24th power is assembled as ((E^3)^2)^2)^2 from Jacobi's
sparse expansion of E^3, and the dense squarings run through a Kronecker
substitution into one big-integer product (gmpy2/GMP).  Coefficients of
the final expansion exceed 64-bit range long before n = 10^4, so the
packing uses 128-bit limbs and the results come back as Python ints.
"""

from __future__ import annotations

import numpy as np
import gmpy2

_LIMB_BYTES = 16  # conv coefficients stay below 2^120 for every level used here


def pentagonal_terms(deg_max: int) -> list[tuple[int, int]]:
    """Sparse expansion of E(q) = prod(1-q^n): Euler's pentagonal numbers."""
    terms = [(0, 1)]
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 > deg_max:
            break
        sign = -1 if k % 2 else 1
        terms.append((g1, sign))
        if g2 <= deg_max:
            terms.append((g2, sign))
        k += 1
    return sorted(terms)


def jacobi_cube_terms(deg_max: int) -> list[tuple[int, int]]:
    """Sparse expansion of E(q)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}."""
    terms = []
    k = 0
    while True:
        g = k * (k + 1) // 2
        if g > deg_max:
            break
        terms.append((g, (2 * k + 1) * (-1 if k % 2 else 1)))
        k += 1
    return terms


def sparse_convolve(a: list[tuple[int, int]], b: list[tuple[int, int]], deg_max: int) -> np.ndarray:
    """Dense int64 product of two sparse integer polynomials, truncated."""
    out = np.zeros(deg_max + 1, dtype=np.int64)
    offs_a = np.array([o for o, _ in a], dtype=np.int64)
    cofs_a = np.array([c for _, c in a], dtype=np.int64)
    offs_b = np.array([o for o, _ in b], dtype=np.int64)
    cofs_b = np.array([c for _, c in b], dtype=np.int64)
    sums = offs_a[:, None] + offs_b[None, :]
    prods = cofs_a[:, None] * cofs_b[None, :]
    mask = sums <= deg_max
    np.add.at(out, sums[mask], prods[mask])
    return out


def _pack_nonneg(coeffs: np.ndarray) -> gmpy2.mpz:
    # coefficients must fit a single u64 word; the upper limb word stays zero
    arr = np.zeros((coeffs.size, 2), dtype="<u8")
    arr[:, 0] = coeffs.astype(np.uint64)
    return gmpy2.mpz(int.from_bytes(arr.tobytes(), "little"))


def _unpack(z: gmpy2.mpz, count: int) -> tuple[np.ndarray, np.ndarray]:
    raw = int(z).to_bytes(_LIMB_BYTES * count, "little")
    words = np.frombuffer(raw, dtype="<u8").reshape(count, 2)
    return words[:, 0].copy(), words[:, 1].copy()


def poly_square_exact(coeffs: np.ndarray, keep: int) -> np.ndarray:
    """Exact square of an int64-coefficient polynomial, first `keep` coefficients.

    Returns an object array of Python ints.  Requires |coeff| < 2^52 so
    that the three nonnegative-part products fit the 128-bit limbs.
    """
    coeffs = np.asarray(coeffs, dtype=np.int64)
    if coeffs.size and int(np.abs(coeffs).max()) >= (1 << 52):
        raise OverflowError("coefficients too large for 128-bit Kronecker limbs")
    pos = np.where(coeffs > 0, coeffs, 0)
    neg = np.where(coeffs < 0, -coeffs, 0)
    zp = _pack_nonneg(pos)
    zn = _pack_nonneg(neg)
    pp = zp * zp
    nn = zn * zn
    pn = zp * zn
    full = 2 * coeffs.size  # product occupies at most 2n limbs
    pp_lo, pp_hi = (w[:keep] for w in _unpack(pp, full))
    nn_lo, nn_hi = (w[:keep] for w in _unpack(nn, full))
    pn_lo, pn_hi = (w[:keep] for w in _unpack(pn, full))
    lo = pp_lo.astype(object) + nn_lo.astype(object) - 2 * pn_lo.astype(object)
    hi = pp_hi.astype(object) + nn_hi.astype(object) - 2 * pn_hi.astype(object)
    return lo + (hi << 64)


def poly_mul_ref(a, b, keep: int) -> list[int]:
    """Schoolbook exact polynomial product (reference path for tests)."""
    out = [0] * keep
    for i, ca in enumerate(a):
        if ca == 0 or i >= keep:
            continue
        for j, cb in enumerate(b):
            if i + j >= keep:
                break
            if cb:
                out[i + j] += ca * cb
    return out


def delta_tau_table(n_max: int) -> list[int]:
    """tau(1..n_max) from q * E(q)^24, exactly."""
    deg = n_max - 1  # tau(n) is the degree-(n-1) coefficient of E^24
    e3 = jacobi_cube_terms(deg)
    e6 = sparse_convolve(e3, e3, deg)
    e12_obj = poly_square_exact(e6, deg + 1)
    e12 = np.array([int(c) for c in e12_obj], dtype=np.int64)  # bounded ~ n^{5/2}
    e24 = poly_square_exact(e12, deg + 1)
    return [int(c) for c in e24]


def delta_tau_table_ref(n_max: int) -> list[int]:
    """tau(1..n_max) by repeated sparse multiplication in pure Python."""
    deg = n_max - 1
    cur = [0] * (deg + 1)
    cur[0] = 1
    terms = jacobi_cube_terms(deg)
    for _ in range(8):
        new = [0] * (deg + 1)
        for off, c in terms:
            for i in range(deg + 1 - off):
                v = cur[i]
                if v:
                    new[i + off] += c * v
        cur = new
    return cur


def level11_an_table(n_max: int) -> list[int]:
    """a(1..n_max) of the level-11 weight-2 newform, q * E(q)^2 E(q^11)^2."""
    deg = n_max - 1
    e1 = pentagonal_terms(deg)
    sq = sparse_convolve(e1, e1, deg)  # E(q)^2
    e11 = pentagonal_terms(deg // 11)
    sq11 = sparse_convolve(e11, e11, deg // 11)  # E(q)^2 in q^11
    out = np.zeros(deg + 1, dtype=np.int64)
    for i in range(sq11.size):
        c = int(sq11[i])
        if c:
            hi = deg - 11 * i
            out[11 * i :] += c * sq[: hi + 1]
    return [int(c) for c in out]
