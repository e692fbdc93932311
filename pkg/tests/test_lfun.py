import cmath
import math

import numpy as np
import pytest

from mfun.arith import primes_up_to
from mfun.characters import CharacterGroup
from mfun.coeffs import CoeffCase, l_table
from mfun.errors import CutoffError, RegimeError
from mfun.forms import satake
from mfun.lfun import (EvalParams, conductor_bound, dirichlet_partial, frak_L,
                       frak_L_tail_bound, g_eval, g_plus, local_term)

CASES = list(CoeffCase)


def test_exp_log_identity(delta):
    params = EvalParams(p_max=5000, n_max=5000)
    val = frak_L(CoeffCase.LOG, delta, s=3.0, params=params)
    prod = 1.0
    for p in primes_up_to(5000):
        pair = satake(delta, p)
        prod *= 1 / ((1 - pair.alpha * p**-3.0) * (1 - pair.beta * p**-3.0))
    assert abs(cmath.exp(val) - prod) < 1e-12


def test_euler_vs_dirichlet_at_s10(delta):
    # partial Euler product against the direct Dirichlet sum to 1e5
    params = EvalParams(p_max=100_000, n_max=100_000)
    logval = frak_L(CoeffCase.LOG, delta, s=10.0, params=params)
    euler = cmath.exp(logval)
    tab = l_table(CoeffCase.LOG, -2j, delta, 100_000)  # l_{-2i}(n) = eta(n)
    n = np.arange(1, 100_001, dtype=np.float64)
    direct = np.sum(tab[1:] * n**-10.0)
    assert abs(euler - (direct)) < 1e-10


def test_twisted_principal_drops_local_factor(delta):
    group = CharacterGroup(7)
    params = EvalParams(p_max=2000, n_max=2000)
    for case in CASES:
        tw = frak_L(case, delta, group, 0, s=2.5, params=params)
        untw = frak_L(case, delta, None, None, s=2.5, params=params)
        local = local_term(case, delta, 7, 7 ** (-2.5))
        assert abs(tw - (untw - local)) < 1e-14


def test_g_eval_identities(delta):
    params = EvalParams(p_max=2000, n_max=2000)
    assert g_eval(CoeffCase.LOG, delta, s=2.0, z=0, params=params) == 1
    for case in CASES:
        a = g_eval(case, delta, s=2.0 + 1j, z=1.5 - 0.5j, params=params)
        b = g_eval(case, delta, s=2.0 + 1j, z=-(1.5 - 0.5j), params=params)
        assert abs(a * b - 1) < 1e-12


def test_g_eval_vs_dirichlet_series(delta):
    s, z = 2 + 0.3j, 1.0
    params = EvalParams(p_max=100_000, n_max=100_000)
    for case in CASES:
        g = g_eval(case, delta, s=s, z=z, params=params)
        d = dirichlet_partial(case, delta, s, z, 100_000)
        assert abs(g - d) <= 1e-5


def test_regime_consistency_sampled(delta, f11a):
    # 20 (s, z, chi) triples on Re(s) in [1.5, 3]: two evaluation routes
    # agree within 10x the combined tail estimate
    triples = []
    ss = [1.5, 1.8, 2.2, 2.6, 3.0]
    zs = [0.5, 1j, -1 + 0.5j, 2.0]
    for i, s_re in enumerate(ss):
        for j, z in enumerate(zs):
            triples.append((s_re + 0.1j * ((i + j) % 3 - 1), z, (i + 2 * j) % 5))
    for form, m, n_max in ((delta, 11, 30_000), (f11a, 7, 5000)):
        grp = CharacterGroup(m)
        params = EvalParams(p_max=n_max, n_max=n_max)
        for case in CASES:
            for s, z, j in triples:
                g = g_eval(case, form, grp, j, s, z, params)
                d = dirichlet_partial(case, form, s, z, n_max, grp, j)
                tab = l_table(case, z, form, n_max)
                n = np.arange(1, n_max + 1)
                c_fit = float(np.max(np.abs(tab[1:]) / n**0.25))
                sig = complex(s).real
                dirichlet_tail = c_fit * n_max ** (1.25 - sig) / (sig - 1.25)
                euler_tail = abs(g) * (
                    math.exp(abs(z) / 2 * frak_L_tail_bound(case, sig, n_max)) - 1)
                budget = 10 * (dirichlet_tail + euler_tail)
                assert abs(g - d) <= max(budget, 1e-12), (case, s, z, j)


def test_g_plus_basics(delta):
    # n_max = 1: only l(1) = 1 survives
    params = EvalParams(p_max=2, n_max=2, X=10.0, tol=0.5)
    v = g_plus(CoeffCase.LOG, delta, s=2.0, z=1.0, params=params, n_max=1)
    assert abs(v - math.exp(-1 / 10.0)) < 1e-15


def test_g_plus_close_to_g_eval_at_large_X(delta):
    params_big = EvalParams(p_max=100_000, n_max=100_000, X=1e6, tol=1e-4)
    eval_params = EvalParams(p_max=100_000, n_max=100_000)
    for case in CASES:
        gp = g_plus(case, delta, s=2.0, z=1.0, params=params_big)
        ge = g_eval(case, delta, s=2.0, z=1.0, params=eval_params)
        assert abs(gp - ge) <= 1e-4


def test_g_plus_monotone_improvement(delta):
    eval_params = EvalParams(p_max=50_000, n_max=50_000)
    ge = g_eval(CoeffCase.LOG, delta, s=2.0, z=1.0, params=eval_params)
    errs = []
    for X in (1e2, 1e4):
        params = EvalParams(p_max=50_000, n_max=50_000, X=X, tol=1e-3)
        errs.append(abs(g_plus(CoeffCase.LOG, delta, s=2.0, z=1.0, params=params) - ge))
    assert errs[0] >= errs[1]


def test_g_plus_conjugation(delta):
    s, z = 1.8 + 0.4j, 0.7 - 0.2j
    params = EvalParams(p_max=20_000, n_max=20_000, X=1e5, tol=1e-3)
    for case in CASES:
        a = g_plus(case, delta, s=s, z=z, params=params)
        b = g_plus(case, delta, s=s.conjugate(), z=-z.conjugate(), params=params)
        assert abs(a.conjugate() - b) < 1e-10


def test_regime_errors(delta):
    with pytest.raises(RegimeError, match="g_plus"):
        frak_L(CoeffCase.LOG, delta, s=0.9)
    with pytest.raises(RegimeError):
        g_plus(CoeffCase.LOG, delta, s=0.4, z=1.0)


def test_g_plus_cutoff_error(delta):
    params = EvalParams(p_max=100, n_max=100, X=1e6, tol=1e-9)
    with pytest.raises(CutoffError, match="suggest"):
        g_plus(CoeffCase.LOG, delta, s=0.8, z=1.0, params=params)


def test_conductor_bound(f11a, delta):
    assert conductor_bound(f11a, 5, 1) == 9900
    assert conductor_bound(delta, 3, 0) == 2025
    vals = [conductor_bound(delta, 3, s) for s in (0, 1j, 2, 5j)]
    assert vals == sorted(vals)


def test_eval_params_validation():
    with pytest.raises(ValueError):
        EvalParams(p_max=100, n_max=50)
    with pytest.raises(ValueError):
        EvalParams(X=-1)
