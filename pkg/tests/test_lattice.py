import numpy as np
import pytest

from hilbert_siegel.base_ring import RingElement
from hilbert_siegel.lattice import (
    TraceFormLattice,
    box_vectors,
    elements_of_norm,
    elements_of_norm_via_rank16,
    short_vectors,
    short_vectors_gram,
)
from hilbert_siegel.quaternion_order import build_maximal_order


def _lexsorted(a):
    return a[np.lexsort(a.T[::-1])]


@pytest.fixture(scope="module")
def L8():
    return TraceFormLattice.of_order(False)


@pytest.fixture(scope="module")
def box8(L8):
    return {t: box_vectors(L8.gram, t) for t in range(1, 9)}


@pytest.mark.parametrize("pairs", [False, True])
def test_gram_positive_definite(pairs):
    L = TraceFormLattice.of_order(pairs)
    G = np.array(L.gram)
    assert np.array_equal(G, G.T)
    assert all(m > 0 for m in L.leading_minors())


def test_zero_vector_only(L8):
    assert short_vectors_gram(L8.gram, 0) == [(0,) * 8]


def test_gram_matches_trace_of_norm(L8):
    O = build_maximal_order()
    rng = np.random.default_rng(0)
    v = rng.integers(-4, 5, size=(40, 8))
    nr = O.nr(v)
    assert all(L8.value(x) == RingElement(*n).trace() for x, n in zip(v, nr))


@pytest.mark.parametrize("t", range(1, 9))
def test_rank8_matches_box_oracle(L8, box8, t):
    got = short_vectors(L8, t)
    assert np.array_equal(got, box8[t])
    if t == 2:
        assert len(got) == 120


@pytest.mark.parametrize("t", range(1, 6))
def test_rank16_matches_product_oracle(L8, box8, t):
    # the pair lattice is an orthogonal sum, so its vectors are pairs of rank-8 vectors
    zero = np.zeros((1, 8), dtype=np.int64)
    parts = []
    for t1 in range(t + 1):
        A = zero if t1 == 0 else box8[t1]
        B = zero if t1 == t else box8[t - t1]
        if len(A) and len(B):
            parts.append(np.concatenate([np.repeat(A, len(B), 0), np.tile(B, (len(A), 1))], axis=1))
    oracle = _lexsorted(np.concatenate(parts)) if parts else np.zeros((0, 16), dtype=np.int64)
    got = short_vectors(TraceFormLattice.of_order(True), t)
    assert np.array_equal(got, oracle)


def test_short_vectors_are_sorted_and_symmetric(L8):
    v = short_vectors(L8, 6)
    assert np.array_equal(v, _lexsorted(v))
    assert {tuple(x) for x in v} == {tuple(-x) for x in v}


def test_elements_of_norm_one():
    assert len(elements_of_norm(RingElement(1))) == 120


@pytest.mark.parametrize("lam", [RingElement(1), RingElement(2, 1), RingElement(2), RingElement(3, 1)])
def test_pairs_match_rank16_enumeration(lam):
    O = build_maximal_order()
    pairs = elements_of_norm(lam, pairs=True)
    nr = O.nr(pairs[:, :8]) + O.nr(pairs[:, 8:])
    assert np.all(nr == [lam.a, lam.b])
    assert np.array_equal(pairs, _lexsorted(elements_of_norm_via_rank16(lam)))


def test_norm_one_pairs_are_unit_and_zero():
    pairs = elements_of_norm(RingElement(1), pairs=True)
    assert len(pairs) == 240
    assert all(not p[:8].any() or not p[8:].any() for p in pairs)


def test_not_totally_positive_is_empty():
    assert len(elements_of_norm(RingElement(0, 1), pairs=True)) == 0
