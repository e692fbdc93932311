"""Coefficient algebra for the quasi-character expansions.

Two parallel cases run through everything: the log-derivative case
(coefficients h_n evaluated at -(iz/2) log p) and the logarithm case
(coefficients H_n evaluated at iz/2).  The Dirichlet coefficients l_z(n)
of exp((iz/2) L'/L) resp. exp((iz/2) log L) expand over the parity index
set J_N(n) as sums c_{z,x}(n) eta(x); this module implements the h/H
generating coefficients, the c coefficients, the index sets, and both an
efficient multiplicative route and an independent power-series route to
l_z(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .arith import SpfTable, factorize
from .forms import ModularForm, eta_prime_power, satake

GEN_COEFF_CAP = 512


class CoeffCase(Enum):
    LOG_DERIV = "log-deriv"
    LOG = "log"


def gen_coeff(case: CoeffCase, n: int, x: complex) -> complex:
    """h_n(x) (log-deriv case) or H_n(x) (log case).

    h_n(x) = sum_{r=1}^n binom(n-1, r-1) x^r / r!, H_n(x) is the rising
    factorial x(x+1)...(x+n-1)/n!; both built term-by-term so no
    factorial ever overflows.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > GEN_COEFF_CAP:
        raise ValueError(f"n={n} exceeds cap {GEN_COEFF_CAP}")
    if n == 0:
        return 1.0 + 0j
    x = complex(x)
    if case is CoeffCase.LOG:
        out = 1.0 + 0j
        for j in range(n):
            out *= (x + j) / (j + 1)
        return out
    term = x  # r = 1 term: binom(n-1,0) x / 1!
    total = x
    for r in range(1, n):
        term *= x * (n - r) / (r * (r + 1))
        total += term
    return total


class CoeffContext:
    """Scratch caches bound to one (case, z) pair.

    Not shared between threads; create one per worker.  Keys quantize z
    by its exact bit pattern, which is what binding the context to a
    single z achieves.
    """

    __slots__ = ("case", "z", "h_cache", "l_cache")

    def __init__(self, case: CoeffCase, z: complex):
        self.case = case
        self.z = complex(z)
        self.h_cache: dict = {}
        self.l_cache: dict = {}


def frak_h(case: CoeffCase, z: complex, p: int, r: int,
           ctx: CoeffContext | None = None) -> complex:
    """h_r(-(iz/2) log p) or H_r(iz/2), depending on the case."""
    if r < 0:
        return 0j
    if ctx is not None:
        key = r if case is CoeffCase.LOG else (p, r)
        val = ctx.h_cache.get(key)
        if val is None:
            val = frak_h(case, ctx.z, p, r, None)
            ctx.h_cache[key] = val
        return val
    if case is CoeffCase.LOG:
        return gen_coeff(case, r, 0.5j * z)
    return gen_coeff(case, r, -0.5j * z * math.log(p))


def c_coeff(case: CoeffCase, z: complex, level: int, p: int, r: int, a: int,
            ctx: CoeffContext | None = None) -> complex:
    """The local expansion coefficient of eta(p^a) inside l_z(p^r)."""
    if r < 0 or a < 0:
        raise ValueError("r and a must be nonnegative")
    if level % p == 0:
        return frak_h(case, z, p, r, ctx) if r == a else 0j
    if (r - a) % 2 or a > r:
        return 0j
    lo = (r - a) // 2
    hi = (r + a) // 2
    first = frak_h(case, z, p, lo, ctx) * frak_h(case, z, p, hi, ctx)
    if lo == 0:
        return first
    return first - frak_h(case, z, p, lo - 1, ctx) * frak_h(case, z, p, hi + 1, ctx)


def j_set(level: int, n: int) -> list[int]:
    """J_N(n): x with v_p(x) <= v_p(n), matching parity everywhere, and
    v_p(x) = v_p(n) at primes dividing the level.  Increasing order."""
    if n < 1:
        raise ValueError("n must be positive")
    members = [1]
    for p, e in factorize(n):
        exps = [e] if level % p == 0 else list(range(e % 2, e + 1, 2))
        members = [m * p**a for m in members for a in exps]
    return sorted(members)


def in_parity_class(level: int, n: int, m: int) -> bool:
    """Membership of m in I_N(n): exponent parities agree at every prime,
    with equality at primes dividing the level."""
    fn = dict(factorize(n)) if n > 1 else {}
    fm = dict(factorize(m)) if m > 1 else {}
    for p in set(fn) | set(fm):
        en, em = fn.get(p, 0), fm.get(p, 0)
        if level % p == 0:
            if en != em:
                return False
        elif (en - em) % 2:
            return False
    return True


def c_coeff_n(case: CoeffCase, z: complex, level: int, n: int, x: int,
              ctx: CoeffContext | None = None) -> complex:
    """c_{z,x}(n) = prod over p|n of the local coefficients; 0 off J_N(n)."""
    if n < 1 or x < 1:
        raise ValueError("n and x must be positive")
    fn = dict(factorize(n)) if n > 1 else {}
    fx = dict(factorize(x)) if x > 1 else {}
    if any(p not in fn for p in fx):
        return 0j
    out = 1.0 + 0j
    for p, r in fn.items():
        out *= c_coeff(case, z, level, p, r, fx.get(p, 0), ctx)
        if out == 0:
            return 0j
    return out


def l_prime_power(case: CoeffCase, z: complex, form: ModularForm, p: int, r: int,
                  ctx: CoeffContext | None = None) -> complex:
    """l_z(p^r) for one prime, via the J-set expansion."""
    if ctx is not None:
        val = ctx.l_cache.get((p, r))
        if val is not None:
            return val
    if r == 0:
        out = 1.0 + 0j
    elif form.level % p == 0:
        out = frak_h(case, z, p, r, ctx) * eta_prime_power(form, p, r)
    else:
        out = 0j
        for a in range(r % 2, r + 1, 2):
            c = c_coeff(case, z, form.level, p, r, a, ctx)
            if c:
                out += c * eta_prime_power(form, p, a)
    if ctx is not None:
        ctx.l_cache[(p, r)] = out
    return out


def l_coeff(case: CoeffCase, z: complex, form: ModularForm, n: int,
            ctx: CoeffContext | None = None) -> complex:
    """l_z(n) = sum over x in J_N(n) of c_{z,x}(n) eta(x), multiplicatively."""
    if n < 1:
        raise ValueError("n must be positive")
    out = 1.0 + 0j
    for p, r in factorize(n):
        out *= l_prime_power(case, z, form, p, r, ctx)
    return out


def l_coeff_direct(case: CoeffCase, z: complex, form: ModularForm, n: int) -> complex:
    """l_z(n) through an explicit J-set materialization (slow route)."""
    return sum(
        (c_coeff_n(case, z, form.level, n, x) * _eta_multiplicative(form, x)
         for x in j_set(form.level, n)),
        start=0j,
    )


def _eta_multiplicative(form: ModularForm, x: int) -> float:
    out = 1.0
    for p, e in factorize(x):
        out *= eta_prime_power(form, p, e)
    return out


def l_coeff_oracle(case: CoeffCase, z: complex, form: ModularForm, n: int) -> complex:
    """Independent route to l_z(n): exponentiate the local Dirichlet series.

    Per prime p | n, build the power series of the local logarithm /
    log-derivative in u = p^{-s} from the Satake parameters, multiply by
    iz/2, exponentiate formally, and read off the u^{v_p(n)} coefficient.
    """
    if n < 1:
        raise ValueError("n must be positive")
    out = 1.0 + 0j
    for p, r in factorize(n):
        out *= _local_series_coeff(case, z, form, p, r)
    return out


def _local_series_coeff(case: CoeffCase, z: complex, form: ModularForm,
                        p: int, r: int) -> complex:
    pair = satake(form, p)
    # s_k = alpha^k + beta^k; Chebyshev-style recursion keeps it exact-ish
    s = [2.0 + 0j, pair.alpha + pair.beta]
    if form.level % p == 0:
        for k in range(2, r + 1):
            s.append(pair.alpha ** k)
        s[1] = pair.alpha
    else:
        ep = pair.alpha + pair.beta
        for _ in range(2, r + 1):
            s.append(ep * s[-1] - s[-2])
    logp = math.log(p)
    a = [0j] * (r + 1)
    for k in range(1, r + 1):
        a[k] = s[k] / k if case is CoeffCase.LOG else -logp * s[k]
    w = 0.5j * z
    scaled = [w * ak for ak in a]
    b = [1.0 + 0j] + [0j] * r
    for j in range(1, r + 1):
        acc = 0j
        for k in range(1, j + 1):
            acc += k * scaled[k] * b[j - k]
        b[j] = acc / j
    return b[r]


def l_table(case: CoeffCase, z: complex, form: ModularForm, n_max: int,
            spf: SpfTable | None = None,
            ctx: CoeffContext | None = None) -> np.ndarray:
    """l_z(n) for n = 1..n_max as a complex array (index 0 unused)."""
    if spf is None:
        spf = SpfTable(n_max)
    if ctx is None:
        ctx = CoeffContext(case, z)
    out = np.zeros(n_max + 1, dtype=np.complex128)
    out[1] = 1.0
    spf_arr = spf.spf
    for n in range(2, n_max + 1):
        p = int(spf_arr[n])
        m = n // p
        r = 1
        while m % p == 0:
            m //= p
            r += 1
        out[n] = l_prime_power(case, z, form, p, r, ctx) * out[m]
    return out


@dataclass(frozen=True)
class SquareDecomposition:
    """r_minus^2 is the largest square dividing n, r_plus^2 the least
    square divisible by n; kernel = r_plus/r_minus is the squarefree part."""

    r_minus: int
    r_plus: int
    kernel: int


def square_parts(n: int) -> SquareDecomposition:
    if n < 1:
        raise ValueError("n must be positive")
    r_minus = 1
    kernel = 1
    for p, e in factorize(n):
        r_minus *= p ** (e // 2)
        if e % 2:
            kernel *= p
    return SquareDecomposition(r_minus, r_minus * kernel, kernel)
