import math

import pytest

from mfun.errors import FormatError
from mfun.forms import (ModularForm, build_builtin, eta, load_form, satake,
                        save_form)


def test_builtin_delta_values(delta, tau_table):
    assert delta.level == 1 and delta.weight == 12
    assert abs(delta.eta_prime(2) - (-24) / 2**5.5) < 1e-15
    # normalized eigenvalue example: -24 / 2^5.5
    assert abs(delta.eta_prime(2) + 0.5303300858899107) < 1e-12


def test_builtin_11a_point_counts(f11a, a11_table):
    # a_2 = -2 by brute-force counting over F_2
    assert abs(f11a.eta_prime(2) + math.sqrt(2)) < 1e-14
    # point counting agrees with the eta-product q-expansion at every prime
    for p in (2, 3, 5, 7, 13, 17, 101, 997):
        assert abs(f11a.eta_prime(p) - a11_table[p - 1] / math.sqrt(p)) < 1e-12
    assert abs(f11a.eta_prime(11) - 1 / math.sqrt(11)) < 1e-15


def test_eta_recursion_vs_qexpansion_spot(delta, tau_table):
    for n in (1, 4, 6, 8, 12, 144, 720, 9999):
        want = tau_table[n - 1] / n**5.5
        assert abs(eta(delta, n) - want) <= 1e-10 * max(1.0, abs(want))


def test_eta_composite_with_bad_prime(f11a, a11_table):
    for n in (11, 22, 121, 242, 999):
        want = a11_table[n - 1] / math.sqrt(n)
        assert abs(eta(f11a, n) - want) <= 1e-10 * max(1.0, abs(want))


def test_eta_out_of_range(delta):
    with pytest.raises(ValueError, match="no eigenvalue"):
        eta(build_builtin("delta", 10), 13)


def test_deligne_bound_all_stored_primes(delta, f11a):
    for form in (delta, f11a):
        for p in form.stored_primes():
            if form.level % p:
                assert abs(form.eta_prime(p)) <= 2 + 1e-12
            else:
                assert abs(abs(form.eta_prime(p)) - p**-0.5) < 1e-12


def test_divisor_count_bound(delta):
    # |eta(n)| <= tau_0(n), the divisor count
    from mfun.arith import divisor_count

    for n in range(1, 2001):
        assert abs(eta(delta, n)) <= divisor_count(n) + 1e-9


def test_satake_invariants(delta):
    for p in delta.stored_primes():
        if p > 1000:
            break
        pair = satake(delta, p)
        assert abs(abs(pair.alpha) - 1) < 1e-12
        assert abs(pair.alpha * pair.beta - 1) < 1e-12
        assert abs(pair.alpha + pair.beta - delta.eta_prime(p)) < 1e-12
        assert pair.alpha.imag >= 0


def test_satake_double_root():
    synthetic = ModularForm(1, 12, {2: 2.0}, label="edge")
    pair = satake(synthetic, 2)
    assert abs(pair.alpha - 1) < 1e-12 and abs(pair.beta - 1) < 1e-12


def test_satake_bad_prime(f11a):
    pair = satake(f11a, 11)
    assert pair.beta == 0 and abs(pair.alpha - 1 / math.sqrt(11)) < 1e-15


def test_builtin_errors():
    with pytest.raises(ValueError, match="unknown builtin"):
        build_builtin("delta2", 10)
    with pytest.raises(ValueError, match="cap"):
        build_builtin("delta", 10**7)
    with pytest.raises(ValueError):
        build_builtin("delta", 1)


def test_load_form_roundtrip(tmp_path, f11a):
    path = tmp_path / "11a.csv"
    save_form(f11a, path)
    again = load_form(path)
    assert again.level == 11 and again.weight == 2
    for p in f11a.stored_primes():
        assert again.eta_prime(p) == pytest.approx(f11a.eta_prime(p), abs=1e-15)


def test_load_form_normalization(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("#level=11,weight=2,label=t\n2,-2\n", encoding="utf-8")
    form = load_form(path)
    assert abs(form.eta_prime(2) + math.sqrt(2)) < 1e-15


def test_load_form_deligne_rejection(tmp_path):
    # threshold at p=2, weight 12 is 2 * 2^5.5 ~ 90.5: 5 passes, 200 fails
    ok = tmp_path / "ok.csv"
    ok.write_text("#level=1,weight=12,label=t\n2,5\n", encoding="utf-8")
    assert abs(load_form(ok).eta_prime(2) - 5 / 2**5.5) < 1e-15
    bad = tmp_path / "bad.csv"
    bad.write_text("#level=1,weight=12,label=t\n2,200\n", encoding="utf-8")
    with pytest.raises(FormatError, match="p=2"):
        load_form(bad)


def test_load_form_structural_errors(tmp_path):
    nosq = tmp_path / "a.csv"
    nosq.write_text("#level=12,weight=2,label=t\n5,1\n", encoding="utf-8")
    with pytest.raises(FormatError, match="squarefree"):
        load_form(nosq)
    noheader = tmp_path / "b.csv"
    noheader.write_text("2,-2\n", encoding="utf-8")
    with pytest.raises(FormatError, match="header"):
        load_form(noheader)
    decreasing = tmp_path / "c.csv"
    decreasing.write_text("#level=1,weight=12,label=t\n5,1\n3,1\n", encoding="utf-8")
    with pytest.raises(FormatError, match="increasing"):
        load_form(decreasing)
    composite = tmp_path / "d.csv"
    composite.write_text("#level=1,weight=12,label=t\n4,1\n", encoding="utf-8")
    with pytest.raises(FormatError, match="not prime"):
        load_form(composite)


def test_bad_prime_eigenvalue_validation():
    with pytest.raises(FormatError, match="bad prime"):
        ModularForm(11, 2, {11: 0.5})
    ModularForm(11, 2, {11: -(11**-0.5)})  # minus sign is allowed
