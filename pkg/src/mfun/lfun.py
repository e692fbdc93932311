"""Rigorous-regime evaluation of log L / L'/L for (twisted) forms.

For Re(s) > 1 the value is the sum of principal-branch local terms over
primes up to a cutoff; the exponential-smoothing partial sum g_plus is
also exposed for the exploratory strip 1/2 < Re(s) <= 1/2 + ... <= 1,
where no unconditional meaning is claimed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .accum import KahanSum
from .arith import SpfTable, primes_up_to
from .characters import CharacterGroup, chi_eval, chi_value_table
from .coeffs import CoeffCase, CoeffContext, l_table
from .errors import CutoffError, RegimeError
from .forms import ModularForm, satake


@dataclass(frozen=True)
class EvalParams:
    """Truncation controls for the evaluators.

    p_max bounds Euler products, n_max bounds Dirichlet sums, X is the
    exponential smoothing scale, tol the target tail tolerance.
    """

    p_max: int = 10_000
    n_max: int = 100_000
    X: float = 1.0e6
    tol: float = 1.0e-9

    def __post_init__(self):
        if self.p_max < 2 or self.n_max < 1 or self.X <= 0 or self.tol <= 0:
            raise ValueError("EvalParams fields must be positive")
        if self.n_max < self.p_max:
            raise ValueError("n_max must be at least p_max")

    def with_X(self, X: float) -> "EvalParams":
        return replace(self, X=X)


def local_term(case: CoeffCase, form: ModularForm, p: int, t: complex) -> complex:
    """The local value at argument t = chi(p) p^{-s}.

    Log case: -log(1-alpha t) - log(1-beta t), principal branches.
    Log-derivative case: -log p (alpha t/(1-alpha t) + beta t/(1-beta t)).
    """
    pair = satake(form, p)
    if case is CoeffCase.LOG:
        return -cmath.log(1 - pair.alpha * t) - cmath.log(1 - pair.beta * t)
    out = pair.alpha * t / (1 - pair.alpha * t)
    if pair.beta:
        out += pair.beta * t / (1 - pair.beta * t)
    return -math.log(p) * out


def frak_L(case: CoeffCase, form: ModularForm,
           group: CharacterGroup | None = None, j: int | None = None,
           s: complex = 2.0, params: EvalParams | None = None) -> complex:
    """log L or L'/L of f (optionally twisted by chi_j mod m) at Re(s) > 1."""
    params = params or EvalParams()
    s = complex(s)
    if s.real <= 1:
        raise RegimeError(
            f"frak_L requires Re(s) > 1 (got {s.real}); use g_plus for the "
            "exploratory strip")
    acc = KahanSum(0j)
    for p in primes_up_to(min(params.p_max, form.p_max)):
        chi_p = 1.0 + 0j if group is None else chi_eval(group, j, p)
        if chi_p == 0:
            continue
        acc.add(local_term(case, form, p, chi_p * p ** (-s)))
    return acc.value


def frak_L_tail_bound(case: CoeffCase, sigma: float, p_max: int) -> float:
    """Crude truncation bound: 4 sum_{p > p_max} p^{-sigma} (log p in the
    log-derivative case), by integral comparison over all integers."""
    if sigma <= 1:
        return math.inf
    a = sigma - 1
    base = p_max ** (-a) / a
    if case is CoeffCase.LOG_DERIV:
        base = p_max ** (-a) * (math.log(p_max) / a + 1 / (a * a))
    return 4 * base


def g_eval(case: CoeffCase, form: ModularForm,
           group: CharacterGroup | None = None, j: int | None = None,
           s: complex = 2.0, z: complex = 0.0,
           params: EvalParams | None = None) -> complex:
    """The quasi-character value exp((iz/2) frak_L)."""
    return cmath.exp(0.5j * complex(z) * frak_L(case, form, group, j, s, params))


def g_plus_suggested_n_max(s: complex, X: float, tol: float) -> int:
    n = max(16, int(X))
    while math.exp(-n / X) * n ** (-complex(s).real) >= tol:
        n *= 2
    return n


def g_plus(case: CoeffCase, form: ModularForm,
           group: CharacterGroup | None = None, j: int | None = None,
           s: complex = 2.0, z: complex = 0.0,
           params: EvalParams | None = None,
           l_values=None, spf: SpfTable | None = None,
           n_max: int | None = None) -> complex:
    """Smoothed partial sum sum_n l_z(n) chi(n) e^{-n/X} n^{-s}.

    Valid as a computation for Re(s) > 1/2; in (1/2, 1] it is exploratory
    (the limit statements there are conditional and carry no acceptance
    weight).  A precomputed l-table may be passed to amortize work; an
    explicit n_max overrides the one in params.
    """
    params = params or EvalParams()
    s = complex(s)
    if s.real <= 0.5:
        raise RegimeError(f"g_plus requires Re(s) > 1/2, got {s.real}")
    n_max = params.n_max if n_max is None else n_max
    X = params.X
    if math.exp(-n_max / X) * n_max ** (-s.real) >= params.tol:
        raise CutoffError(
            f"n_max={n_max} insufficient for tol={params.tol} at X={X}; "
            f"suggest n_max >= {g_plus_suggested_n_max(s, X, params.tol)}")
    if l_values is None:
        l_values = l_table(case, z, form, n_max, spf=spf)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    weights = np.exp(-n / X) * n ** (-s)
    if group is not None:
        weights = weights * chi_value_table(group, j, n_max)[1:]
    acc = KahanSum(0j)
    vals = l_values[1 : n_max + 1] * weights
    # ascending n, fixed chunking: reproducible independent of callers
    chunk = 4096
    for i in range(0, vals.size, chunk):
        acc.add(complex(vals[i : i + chunk].sum()))
    return acc.value


def conductor_bound(form: ModularForm, m: int, s: complex) -> float:
    """Upper bound N m^2 (|s| + k + 3)^2 for the analytic conductor."""
    return form.level * m * m * (abs(complex(s)) + form.weight + 3) ** 2


def dirichlet_partial(case: CoeffCase, form: ModularForm, s: complex, z: complex,
                      n_max: int, group: CharacterGroup | None = None,
                      j: int | None = None,
                      l_values=None, spf: SpfTable | None = None) -> complex:
    """Plain truncated Dirichlet sum sum_{n<=n_max} l_z(n) chi(n) n^{-s}."""
    s = complex(s)
    if l_values is None:
        l_values = l_table(case, z, form, n_max, spf=spf)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    weights = n ** (-s)
    if group is not None:
        weights = weights * chi_value_table(group, j, n_max)[1:]
    vals = l_values[1 : n_max + 1] * weights
    acc = KahanSum(0j)
    chunk = 4096
    for i in range(0, vals.size, chunk):
        acc.add(complex(vals[i : i + chunk].sum()))
    return acc.value
