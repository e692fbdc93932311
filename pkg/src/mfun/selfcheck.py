"""Fast end-to-end invariant suite behind `mfun selfcheck`.

Each check prints one PASS/FAIL line; the runner returns overall success.
The full pytest suite is the authoritative gate; this is the quick field
diagnostic.
"""

from __future__ import annotations

import math

import numpy as np

from .characters import CharacterGroup, chi_eval
from .coeffs import (CoeffCase, CoeffContext, gen_coeff, j_set, l_coeff,
                     l_coeff_oracle, square_parts)
from .density import (Constant, GridParams, QuasiCharacter, integrate_against,
                      invert_to_density, mtilde_grid, mtilde_local_quad)
from .forms import build_builtin, eta, satake
from .harness import avg_twists
from .lfun import EvalParams
from .mtilde import MtildeParams, mtilde_euler, mtilde_local, mtilde_series_smooth
from .qexp import delta_tau_table, delta_tau_table_ref


def run(p_max: int = 2000, verbose: bool = True) -> bool:
    checks = []

    def check(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
        except AssertionError as exc:
            checks.append((name, False, str(exc)))
        except Exception as exc:  # report, do not crash the suite
            checks.append((name, False, f"{type(exc).__name__}: {exc}"))

    delta = build_builtin("delta", p_max)
    e11 = build_builtin("11a", min(p_max, 1000))

    def gen_oracle():
        for n in range(16):
            got = gen_coeff(CoeffCase.LOG, n, 1)
            assert abs(got - 1) < 1e-12
        assert abs(gen_coeff(CoeffCase.LOG_DERIV, 2, 1) - 1.5) < 1e-14

    def tau_paths():
        assert delta_tau_table(300) == delta_tau_table_ref(300)

    def eta_recursion():
        top = min(p_max, 2000)
        tau = delta_tau_table(top)
        for n in (4, 12, 720, top):
            assert abs(eta(delta, n) - tau[n - 1] / n**5.5) < 1e-10 * max(
                1, abs(tau[n - 1] / n**5.5))

    def satake_inv():
        for p in (2, 3, 101):
            pair = satake(delta, p)
            assert abs(abs(pair.alpha) - 1) < 1e-12
            assert abs(pair.alpha * pair.beta - 1) < 1e-12

    def characters():
        g = CharacterGroup(101)
        for n in (2, 3, 7):
            tot = sum(chi_eval(g, j, n) for j in range(g.order))
            assert abs(tot) < 1e-10 * g.order

    def coeff_two_path():
        for case in CoeffCase:
            ctx = CoeffContext(case, 1 + 0.5j)
            for n in range(1, 300):
                a = l_coeff(case, 1 + 0.5j, delta, n, ctx)
                b = l_coeff_oracle(case, 1 + 0.5j, delta, n)
                assert abs(a - b) <= 1e-9 * max(1, abs(a))

    def local_two_path():
        for p in (2, 13, 97):
            for z in (1, 3 + 1j):
                q = mtilde_local_quad(CoeffCase.LOG_DERIV, delta, 0.8, p, z)
                s = mtilde_local(CoeffCase.LOG_DERIV, delta, 0.8, z,
                                 np.conj(z), p)
                assert abs(q - s) < 1e-10
                assert abs(q) <= 1 + 1e-12

    def global_two_path():
        par = MtildeParams(n_max=10, p_max=53)
        a = mtilde_euler(CoeffCase.LOG, delta, 1.0, 1, 1j, par)
        b = mtilde_series_smooth(CoeffCase.LOG, delta, 1.0, 1, 1j, par)
        assert abs(a - b) < 1e-8

    def small_grid():
        grid = mtilde_grid(CoeffCase.LOG, delta, 1.0, 100,
                           GridParams(size=64, extent=None))
        dens = invert_to_density(grid)
        mass = integrate_against(dens, Constant())
        assert abs(mass - 1) < 1e-3
        assert dens.samples.real.min() > -1e-6
        n = grid.size
        z = grid.points()[n // 2 + 5, n // 2 - 3]
        back = integrate_against(dens, QuasiCharacter(z, np.conj(z)))
        assert abs(back - grid.samples[n // 2 + 5, n // 2 - 3]) < 1e-4

    def twist_avg_small():
        rec = avg_twists(CoeffCase.LOG, delta, 101, 1.5, -1, 1,
                         params=EvalParams(p_max=p_max, n_max=p_max),
                         mt_params=MtildeParams(n_max=p_max, p_max=p_max))
        assert rec.abs_error < 0.01, rec.abs_error

    def misc_algebra():
        assert j_set(1, 12) == [3, 12]
        sq = square_parts(12)
        assert (sq.r_minus, sq.r_plus, sq.kernel) == (2, 6, 3)
        assert abs(eta(e11, 11) - 1 / math.sqrt(11)) < 1e-14

    check("generating coefficients vs closed forms", gen_oracle)
    check("tau q-expansion two-path equality", tau_paths)
    check("eigenvalue recursion vs q-expansion", eta_recursion)
    check("satake unit-circle invariants", satake_inv)
    check("character orthogonality", characters)
    check("l-coefficient two-path equality", coeff_two_path)
    check("local characteristic two-path", local_two_path)
    check("global series/Euler two-path", global_two_path)
    check("density mass/positivity/round-trip", small_grid)
    check("twist average vs series", twist_avg_small)
    check("index sets and square parts", misc_algebra)

    ok = True
    for name, passed, msg in checks:
        ok &= passed
        if verbose:
            status = "PASS" if passed else "FAIL"
            suffix = f" ({msg})" if msg else ""
            print(f"{status}  {name}{suffix}")
    return ok
