"""Global characteristic-function series: series form, Euler product, and
the harmonic-average double sum.

M-tilde_s(z1, z2) = sum_n l_{z1}(n) l_{z2}(n) n^{-2s} converges for
Re(s) > 1/2 and factors over primes; the twist-average experiments
compare against its sigma-diagonal.  The harmonic variant replaces the
single sum by a double sum over pairs in a common squarefree class and
genuinely depends on Im(s).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .accum import KahanSum
from .arith import SpfTable, factorize, primes_up_to
from .coeffs import (CoeffCase, CoeffContext, c_coeff, l_prime_power, l_table,
                     square_parts)
from .errors import CutoffError
from .forms import ModularForm

TERM_FLOOR = 1e-22  # local series terms below this (relative) are dropped


@dataclass(frozen=True)
class MtildeParams:
    """Truncation controls: series cutoff, Euler cutoff, local power cutoff,
    optional excluded prime (the coprimality filter of twist averages)."""

    n_max: int = 100_000
    p_max: int = 10_000
    r_max: int = 64
    avoid_prime: int | None = None
    tol: float | None = None  # optional tail-tolerance guard

    def __post_init__(self):
        if self.n_max < 1 or self.p_max < 2 or self.r_max < 2:
            raise ValueError("MtildeParams cutoffs out of range")


def _pair_tables(case: CoeffCase, form: ModularForm, z1: complex, z2: complex,
                 n_max: int, spf: SpfTable | None) -> tuple[np.ndarray, np.ndarray]:
    t1 = l_table(case, z1, form, n_max, spf=spf)
    if complex(z2) == complex(z1):
        return t1, t1
    if complex(z2) == -complex(z1).conjugate():
        return t1, np.conj(t1)  # conjugation symmetry of the coefficients
    return t1, l_table(case, z2, form, n_max, spf=spf)


def mtilde_series(case: CoeffCase, form: ModularForm, s: complex,
                  z1: complex, z2: complex, params: MtildeParams | None = None,
                  spf: SpfTable | None = None) -> complex:
    """Truncated series sum_{n <= n_max, avoid nmid n} l_{z1} l_{z2} n^{-2s}."""
    params = params or MtildeParams()
    s = complex(s)
    t1, t2 = _pair_tables(case, form, z1, z2, params.n_max, spf)
    n = np.arange(1, params.n_max + 1, dtype=np.float64)
    vals = t1[1:] * t2[1:] * n ** (-2 * s)
    if params.avoid_prime is not None:
        vals[params.avoid_prime - 1 :: params.avoid_prime] = 0
    acc = KahanSum(0j)
    chunk = 4096
    for i in range(0, vals.size, chunk):
        acc.add(complex(vals[i : i + chunk].sum()))
    if params.tol is not None:
        tail = _series_tail(t1, t2, s.real, params.n_max)
        if tail > params.tol:
            raise CutoffError(
                f"series tail bound {tail:.3g} exceeds tol {params.tol:.3g}; "
                "raise n_max")
    return acc.value


def mtilde_series_tail(case: CoeffCase, form: ModularForm, s: complex,
                       z1: complex, z2: complex,
                       params: MtildeParams | None = None) -> float:
    """Reported tail bound C sum_{n > n_max} n^{-2 Re(s) + 1/2}, with C
    fitted from the computed range.  Infinite at Re(s) <= 3/4."""
    params = params or MtildeParams()
    t1, t2 = _pair_tables(case, form, z1, z2, params.n_max, None)
    return _series_tail(t1, t2, complex(s).real, params.n_max)


def _series_tail(t1: np.ndarray, t2: np.ndarray, sigma: float, n_max: int) -> float:
    if 2 * sigma - 0.5 <= 1:
        return math.inf
    n = np.arange(1, n_max + 1, dtype=np.float64)
    c_fit = float(np.max(np.abs(t1[1:] * t2[1:]) / np.sqrt(n)))
    a = 2 * sigma - 1.5
    return c_fit * n_max ** (-a) / a


def mtilde_sigma(case: CoeffCase, form: ModularForm, s: complex,
                 z1: complex, z2: complex, params: MtildeParams | None = None,
                 spf: SpfTable | None = None) -> complex:
    """The t-free twist-side diagonal: exponent n^{-2 Re(s)} by construction."""
    return mtilde_series(case, form, complex(s).real, z1, z2, params, spf)


def local_terms(case: CoeffCase, form: ModularForm, s: complex,
                z1: complex, z2: complex, p: int, r_max: int,
                ctx1: CoeffContext | None = None,
                ctx2: CoeffContext | None = None) -> list[complex]:
    """Terms l_{z1}(p^r) l_{z2}(p^r) p^{-2rs} for r = 0..R, truncated where
    they fall below the TERM_FLOOR relative to the running maximum."""
    ctx1 = ctx1 or CoeffContext(case, z1)
    ctx2 = ctx2 or CoeffContext(case, z2)
    u = p ** (-2 * complex(s))
    terms = [1.0 + 0j]
    biggest = 1.0
    upow = 1.0 + 0j
    for r in range(1, r_max + 1):
        upow *= u
        t = (l_prime_power(case, z1, form, p, r, ctx1)
             * l_prime_power(case, z2, form, p, r, ctx2) * upow)
        terms.append(t)
        biggest = max(biggest, abs(t))
        if abs(t) < TERM_FLOOR * biggest and r >= 2:
            break
    return terms


def mtilde_local(case: CoeffCase, form: ModularForm, s: complex,
                 z1: complex, z2: complex, p: int, r_max: int = 64,
                 ctx1: CoeffContext | None = None,
                 ctx2: CoeffContext | None = None) -> complex:
    """Local factor sum_{r} l_{z1}(p^r) l_{z2}(p^r) p^{-2rs}."""
    acc = KahanSum(0j)
    for t in local_terms(case, form, s, z1, z2, p, r_max, ctx1, ctx2):
        acc.add(t)
    return acc.value


def mtilde_euler(case: CoeffCase, form: ModularForm, s: complex,
                 z1: complex, z2: complex,
                 params: MtildeParams | None = None) -> complex:
    """Euler product of local factors over p <= p_max (skipping avoid_prime)."""
    params = params or MtildeParams()
    ctx1 = CoeffContext(case, z1)
    ctx2 = CoeffContext(case, z2)
    out = 1.0 + 0j
    for p in primes_up_to(params.p_max):
        if p == params.avoid_prime:
            continue
        out *= mtilde_local(case, form, s, z1, z2, p, params.r_max, ctx1, ctx2)
    return out


def mtilde_euler_tail(case: CoeffCase, sigma: float, p_max: int,
                      z1: complex, z2: complex) -> float:
    """Reported bound on the neglected factors: sum_{p > p_max} |M_p - 1|
    with |M_p - 1| <= 2 |z1 z2| p^{-2 sigma} (times log p in the
    log-derivative case), by integral comparison."""
    if sigma <= 0.5:
        return math.inf
    a = 2 * sigma - 1
    amp = 2 * abs(complex(z1)) * abs(complex(z2))
    base = p_max ** (-a) / a
    if case is CoeffCase.LOG_DERIV:
        base = p_max ** (-a) * (math.log(p_max) / a + 1 / (a * a))
    return amp * base


def mtilde_series_smooth(case: CoeffCase, form: ModularForm, s: complex,
                         z1: complex, z2: complex,
                         params: MtildeParams | None = None,
                         prune: float = 1e-16) -> complex:
    """The series summed over exactly the index set the Euler product covers.

    Enumerates p_max-smooth integers depth-first using the same local
    term arrays as mtilde_euler, so the two routes address the same
    truncation lattice; the comparison isolates the sum-versus-product
    arrangement.  Branches whose best possible extension falls below
    `prune` are dropped.
    """
    params = params or MtildeParams()
    ctx1 = CoeffContext(case, z1)
    ctx2 = CoeffContext(case, z2)
    primes = [p for p in primes_up_to(params.p_max) if p != params.avoid_prime]
    terms = [local_terms(case, form, s, z1, z2, p, params.r_max, ctx1, ctx2)
             for p in primes]
    # |sum of every extension by primes >= k| <= ext[k]; exact-mass prune
    mags = [[abs(t) for t in tt] for tt in terms]
    ext = [0.0] * (len(primes) + 1)
    for k in range(len(primes) - 1, -1, -1):
        ext[k] = (1 + ext[k + 1]) * (1 + sum(mags[k][1:])) - 1
    # suffix maxima over r for early exit inside one prime
    rmax = [[max(mm[r:]) for r in range(1, len(mm))] + [0.0] for mm in mags]
    acc = KahanSum(0j)
    acc.add(1.0 + 0j)  # n = 1
    dropped = 0.0

    def rec(k0: int, val: complex) -> None:
        nonlocal dropped
        a_val = abs(val)
        for k in range(k0, len(primes)):
            if a_val * ext[k] < prune:
                dropped += a_val * ext[k]
                return
            tt = terms[k]
            for r in range(1, len(tt)):
                if a_val * rmax[k][r - 1] * (1 + ext[k + 1]) < prune:
                    dropped += a_val * rmax[k][r - 1] * (1 + ext[k + 1]) * len(tt)
                    break
                v = val * tt[r]
                acc.add(v)
                rec(k + 1, v)

    rec(0, 1.0 + 0j)
    return acc.value


def mtilde_harmonic(case: CoeffCase, s: complex, z1: complex, z2: complex,
                    cutoff: int, m_cutoff: int | None = None) -> complex:
    """Harmonic-average double sum, reparametrized over (n, r).

    Every partner index in the parity class of n has the form
    m = kernel(n) r^2, so the double sum runs over n <= cutoff and
    r <= sqrt(m_cutoff / kernel) <= sqrt(cutoff), with prefactor
    r_+(n)^{-2 sigma} r_-(n)^{2it} r^{-2s}.  The partner cutoff defaults
    to the main one, which keeps the index box symmetric under swapping
    n and m; the conjugation identity holds exactly only on symmetric
    boxes.  Level-1 coefficients; the inner sum over the common index
    set factors over primes.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    if m_cutoff is None:
        m_cutoff = cutoff
    s = complex(s)
    sigma, t_im = s.real, s.imag
    ctx1 = CoeffContext(case, z1)
    ctx2 = CoeffContext(case, z2)
    pair_cache: dict[tuple[int, int, int], complex] = {}

    def pair_factor(p: int, vn: int, vm: int) -> complex:
        key = (p, vn, vm)
        val = pair_cache.get(key)
        if val is None:
            val = 0j
            for a in range(vn % 2, min(vn, vm) + 1, 2):
                val += (c_coeff(case, z1, 1, p, vn, a, ctx1)
                        * c_coeff(case, z2, 1, p, vm, a, ctx2))
            pair_cache[key] = val
        return val

    acc = KahanSum(0j)
    for n in range(1, cutoff + 1):
        sq = square_parts(n)
        fn = dict(factorize(n)) if n > 1 else {}
        pref_n = sq.r_plus ** (-2 * sigma) * cmath.exp(2j * t_im * math.log(sq.r_minus))
        r_top = math.isqrt(m_cutoff // sq.kernel) if sq.kernel <= m_cutoff else 0
        for r in range(1, r_top + 1):
            m = sq.kernel * r * r
            fm = dict(factorize(m)) if m > 1 else {}
            inner = 1.0 + 0j
            for p in set(fn) | set(fm):
                inner *= pair_factor(p, fn.get(p, 0), fm.get(p, 0))
                if inner == 0:
                    break
            if inner == 0:
                continue
            acc.add(pref_n * cmath.exp(-2 * s * math.log(r)) * inner)
    return acc.value
