import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfun.characters import CharacterGroup, build_group, chi_eval, chi_value_table, chi_vector

MODULI = [5, 7, 11, 101]


def test_generators():
    assert build_group(5).generator == 2
    assert build_group(7).generator == 3  # 2 has order 3 mod 7
    assert build_group(11).generator == 2


def test_rejects_bad_moduli():
    for m in (9, 2, 4, 1, 100, 10**5 + 1):
        with pytest.raises(ValueError):
            build_group(m)


def test_dlog_bijection():
    g = build_group(101)
    vals = sorted(int(g.dlog[a]) for a in range(1, 101))
    assert vals == list(range(100))
    for a in range(1, 101):
        assert pow(g.generator, int(g.dlog[a]), 101) == a


def test_point_values():
    g = build_group(5)
    assert chi_eval(g, 0, 3) == 1
    assert abs(chi_eval(g, 1, 2) - 1j) < 1e-15  # dlog(2) = 1, exp(2 pi i/4)
    assert chi_eval(g, 2, 10) == 0


@pytest.mark.parametrize("m", MODULI)
def test_orthogonality(m):
    g = build_group(m)
    for n in range(2, min(m, 25)):
        if n % m == 1 or n % m == 0:
            continue
        total = sum(chi_eval(g, j, n) for j in range(g.order))
        assert abs(total) <= 1e-10 * g.order
    total = sum(chi_eval(g, j, m + 1) for j in range(g.order))
    assert abs(total - g.order) < 1e-9


@given(a=st.integers(1, 1000), b=st.integers(1, 1000), j=st.integers(0, 99))
@settings(max_examples=60, deadline=None)
def test_multiplicativity(a, b, j):
    g = build_group(101)
    lhs = chi_eval(g, j, a * b)
    rhs = chi_eval(g, j, a) * chi_eval(g, j, b)
    assert abs(lhs - rhs) < 1e-12


@given(j1=st.integers(0, 99), j2=st.integers(0, 99), n=st.integers(1, 500))
@settings(max_examples=60, deadline=None)
def test_group_closure(j1, j2, n):
    g = build_group(101)
    lhs = chi_eval(g, j1, n) * chi_eval(g, j2, n)
    rhs = chi_eval(g, (j1 + j2) % g.order, n)
    assert abs(lhs - rhs) < 1e-12


def test_roots_of_unity_exact():
    g = build_group(7)
    for j in range(g.order):
        for n in range(1, 7):
            v = chi_eval(g, j, n)
            assert abs(abs(v) - 1) < 1e-15


def test_vector_and_table_match_pointwise():
    g = build_group(101)
    for n in (1, 2, 57, 101, 202, 999):
        vec = chi_vector(g, n)
        for j in (0, 1, 50, 99):
            assert abs(vec[j] - chi_eval(g, j, n)) < 1e-15
    tab = chi_value_table(g, 3, 500)
    for n in (1, 7, 101, 499):
        assert abs(tab[n] - chi_eval(g, 3, n)) < 1e-15


def test_index_validation():
    g = build_group(11)
    with pytest.raises(ValueError):
        chi_eval(g, 10, 3)
    with pytest.raises(ValueError):
        chi_eval(g, -1, 3)
