from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from hilbert_siegel.base_ring import QuadExtElement, prime_ideal
from hilbert_siegel.eigen import (
    EigenSystem,
    char_poly,
    check_commuting,
    nullspace,
    poly_divmod,
    poly_gcd,
    small_factors,
    split_systems,
    verify_system,
)

from conftest import TABLE1_LEVELS

K2, KS, K3 = "2+0*w", "2+1*w", "3+0*w"
ORDER = [(K2, 1), (K2, 2), (KS, 1), (KS, 2), (K3, 1), (K3, 2)]


def _q(x):
    return QuadExtElement(1, x)


def _mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


square_matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n))


@given(square_matrices)
def test_char_poly_matches_sympy(M):
    x = sympy.Symbol("x")
    expected = sympy.Poly(sympy.Matrix(M).charpoly(x).as_expr(), x).all_coeffs()
    assert char_poly(M) == [int(c) for c in expected]


def test_char_poly_examples():
    assert char_poly([[0, 1], [1, 0]]) == [1, 0, -1]
    assert char_poly(np.eye(4, dtype=int)) == [1, -4, 6, -4, 1]
    with pytest.raises(ValueError):
        char_poly([[1, 2]])


factor_lists = st.lists(
    st.one_of(
        st.integers(-200, 200).map(lambda c: [1, -c]),
        st.sampled_from([[1, -1, -10], [1, -50, 584], [1, -3, -1], [1, 4, -1], [1, 0, -2], [1, -1, -40]]),
    ),
    min_size=1, max_size=6)


@given(factor_lists)
def test_small_factors_reconstruct(factors):
    p = [1]
    for f in factors:
        p = _mul(p, f)
    found, rest = small_factors(p)
    q = list(rest)
    for f, m in found:
        for _ in range(m):
            q = _mul(q, f)
    assert q == p
    # every input factor of degree <= 2 is found (all are irreducible or linear)
    assert rest == [1]
    for f in factors:
        assert f in [g for g, _ in found]


def test_small_factors_leaves_cubic():
    cubic = [1, 0, -4, 1]  # irreducible over Q, three real roots
    found, rest = small_factors(_mul(cubic, [1, -7]))
    assert found == [([1, -7], 1)] and rest == cubic


def test_poly_helpers():
    p = _mul([1, -2], [1, 3])
    assert poly_divmod(p, [1, -2]) == ([1, 3], [0])
    assert poly_gcd(p, _mul([1, -2], [1, 5])) == [1, -2]


def test_nullspace():
    M = [[Fraction(1), Fraction(2), Fraction(3)], [Fraction(2), Fraction(4), Fraction(6)]]
    N = nullspace(M)  # basis vectors are the columns
    assert len(N) == 3 and len(N[0]) == 2
    for v in zip(*N):
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in M)


def test_non_commuting_rejected():
    with pytest.raises(ValueError):
        check_commuting([np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])])
    with pytest.raises(ValueError):
        split_systems("x", {"a": [[1, 1], [0, 1]], "b": [[1, 0], [1, 1]]})


def test_level_11_systems(levels):
    res = levels("3+w")
    cusp = res.cusp_systems
    vals = [tuple(s.eigenvalues[k] for k in ORDER) for s in cusp]
    assert vals == [tuple(map(_q, (24, 35, 34, 48, 88, 60))), tuple(map(_q, (-20, 35, -10, 4, 0, 60)))]
    (eis,) = [s for s in res.systems if s.is_eisenstein]
    assert [eis.eigenvalues[k] for k in ORDER] == list(map(_q, (85, 340, 156, 780, 820, 7380)))


def test_level_9_quadratic_pair(levels):
    (s,) = levels("3").cusp_systems
    assert s.field_disc == 41
    w = lambda a, b: QuadExtElement(41, a, b)
    got = {k: s.eigenvalues[k] for k in [(K2, 1), (K2, 2), (KS, 1), (KS, 2)]}
    want = {(K2, 1): w(25, -3), (K2, 2): w(40, -15), (KS, 1): w(30, 6), (KS, 2): w(24, 36)}
    assert got == want or got == {k: v.conj() for k, v in want.items()}


def test_level_29_residual(levels):
    res = levels("5+w")
    assert len(res.cusp_systems) == 3
    assert res.extracted_dimension() == 3
    assert sum(r.dimension for r in res.residual) == 5 == 8 - 3


@pytest.mark.parametrize("gen", TABLE1_LEVELS)
def test_dimension_bookkeeping_and_exactness(levels, gen):
    res = levels(gen)
    ops = {k: B.entries for k, B in res.brandt.items()}
    assert 1 + res.extracted_dimension() + sum(r.dimension for r in res.residual) == res.h
    assert sum(s.is_eisenstein for s in res.systems) == 1
    for s in res.systems:
        assert verify_system(s, ops)
        assert verify_system(s.conj(), ops)  # Galois closure
        if s.field_disc != 1:
            assert sympy.factorint(s.field_disc) and all(e == 1 for e in sympy.factorint(s.field_disc).values())


def test_eigen_json_round_trip(levels):
    for s in levels("4+w").systems:
        d = s.to_json()
        back = {tuple(k.rsplit(":", 1)): QuadExtElement.from_json(v) for k, v in d["eigenvalues"].items()}
        assert {(p, int(k)): v for (p, k), v in back.items()} == s.eigenvalues
        assert all(isinstance(x, (int, str)) for v in d["eigenvalues"].values() for x in v)


def test_residual_block_for_unseparated_multiplicity():
    # two identical rational cusp systems plus the Eisenstein line
    B = np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]])
    systems, residual = split_systems("toy", {"T": B})
    assert [s.is_eisenstein for s in systems] == [True]
    assert [r.dimension for r in residual] == [2]
    assert residual[0].eigenvalues == {"T": _q(1)}
