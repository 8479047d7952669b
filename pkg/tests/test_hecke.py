import random

import numpy as np
import pytest

from hilbert_siegel.base_ring import RingElement, prime_ideal
from hilbert_siegel.eigen import char_poly
from hilbert_siegel.flags import gamma_orbits
from hilbert_siegel.hecke import (
    UnsupportedOperation,
    _keys,
    _ranks,
    brandt_matrix,
    expected_row_sum,
    hecke_primes,
    theta_count,
    theta_set,
    verify_theta,
)
from hilbert_siegel.lattice import elements_of_norm
from hilbert_siegel import local_splitting
from hilbert_siegel.local_splitting import SplittingMap, split_order
from hilbert_siegel.quaternion_order import build_maximal_order, mat_conj_transpose, mat_mul

from conftest import TABLE1_LEVELS

HECKE = ("2", "2+w", "3")


@pytest.mark.parametrize("gen, kind, size", [
    ("2", 1, 85), ("2", 2, 340), ("2+w", 1, 156), ("2+w", 2, 780), ("3", 1, 820), ("3", 2, 7380)])
def test_theta_sizes(gen, kind, size):
    T = theta_set(gen, kind)
    q = prime_ideal(gen).norm
    assert len(T) == size == theta_count(q, kind)
    verify_theta(T)


def test_theta2_at_2_invariants():
    O = build_maximal_order()
    T = theta_set("2", 2)
    sim = mat_mul(O, T.reps, mat_conj_transpose(O, T.reps))
    four = O.scalar(RingElement(4))
    assert np.all(sim[:, 0, 0] == four) and np.all(sim[:, 1, 1] == four)
    assert not sim[:, 0, 1].any() and not sim[:, 1, 0].any()
    assert np.all(_ranks(prime_ideal("2"), T.reps) == 1)


def _equivalent(O, u, v, pi_s: RingElement) -> np.ndarray:
    """Exact test of v = gamma u for gamma in +-Gamma: v conj(u)^t must be pi^s times a monomial unit matrix."""
    P = mat_mul(O, v, mat_conj_transpose(O, u))  # (..., 2, 2, 8)
    nz = P.any(axis=-1)
    diag = nz[..., 0, 0] & nz[..., 1, 1] & ~nz[..., 0, 1] & ~nz[..., 1, 0]
    anti = nz[..., 0, 1] & nz[..., 1, 0] & ~nz[..., 0, 0] & ~nz[..., 1, 1]
    div = O.is_divisible(P, pi_s).all(axis=(-1, -2)) if P.ndim > 3 else O.is_divisible(P, pi_s).all()
    target = pi_s * pi_s
    nr = O.nr(P)
    unit = ((nr[..., 0] == target.a) & (nr[..., 1] == target.b)) | ~nz
    return (diag | anti) & div & unit.all(axis=(-1, -2))


@pytest.mark.parametrize("gen, kind", [("2", 1), ("2", 2), ("2+w", 1), ("2+w", 2), ("3", 1)])
def test_theta_reps_pairwise_inequivalent(gen, kind):
    O = build_maximal_order()
    T = theta_set(gen, kind)
    pi_s = T.pi ** kind
    n = len(T)
    for s in range(0, n, 64):
        u = T.reps[s:s + 64]
        eq = _equivalent(O, u[:, None], T.reps[None, :], pi_s)
        eq[np.arange(len(u)), np.arange(s, s + len(u))] = False
        assert not eq.any()
        # sanity: each rep is equivalent to itself
    assert _equivalent(O, T.reps[:5], T.reps[:5], pi_s).all()


def test_theta_reps_random_pairs_at_3():
    O = build_maximal_order()
    T = theta_set("3", 2)
    rng = np.random.default_rng(0)
    i, j = rng.integers(0, len(T), 50), rng.integers(0, len(T), 50)
    eq = _equivalent(O, T.reps[i], T.reps[j], T.pi ** 2)
    assert np.array_equal(eq, i == j)


def test_theta1_at_2_covers_raw_solution_set():
    # all u in M_2(O_B) with u conj(u)^t = 2: pairs of orthogonal rows of norm 2
    O = build_maximal_order()
    rows = elements_of_norm(RingElement(2), pairs=True)
    T, C = O.mul_tensor, O.conj_matrix
    Z = np.zeros((8, 8))
    forms = [np.block([[T[:, :, k] @ C.T, Z], [Z, T[:, :, k] @ C.T]]) for k in range(8)]
    R = rows.astype(np.float64)  # exact: entries stay far below 2**53
    hits = []
    for s in range(0, len(R), 500):
        ok = np.ones((len(R[s:s + 500]), len(R)), dtype=bool)
        for m in forms:
            ok &= (R[s:s + 500] @ m @ R.T) == 0
        i, j = np.nonzero(ok)
        hits.append(np.stack([i + s, j], axis=1))
    hits = np.concatenate(hits)
    # +-Gamma (28800 elements) acts freely on the left
    assert len(hits) == 2 * 14400 * len(theta_set("2", 1))
    raw = np.stack([rows[hits[:, 0]], rows[hits[:, 1]]], axis=1).reshape(-1, 2, 2, 8)
    assert np.all(_ranks(prime_ideal("2"), raw) == 2)
    # sampled raw matrices are exactly equivalent to the rep carrying their coset key
    Th = theta_set("2", 1)
    lookup = {k: i for i, k in enumerate(Th.keys)}
    sample = raw[np.random.default_rng(1).integers(0, len(raw), 40)]
    idx = [lookup[k] for k in _keys(prime_ideal("2"), 1, sample)]
    assert _equivalent(O, Th.reps[idx], sample, RingElement(2)).all()


@pytest.mark.parametrize("gen", TABLE1_LEVELS)
def test_brandt_row_sums_and_commutativity(levels, gen):
    res = levels(gen)
    mats = list(res.brandt.values())
    assert len(mats) == 2 * sum(p != gen for p in HECKE)
    for B in mats:
        assert B.entries.dtype == np.int64 and (B.entries >= 0).all()
        assert np.all(B.row_sums() == expected_row_sum(B.prime, B.kind))
    for a in mats:
        for b in mats:
            A, Bm = a.entries.astype(object), b.entries.astype(object)
            assert np.array_equal(A.dot(Bm), Bm.dot(A))


def test_brandt_examples():
    B1 = brandt_matrix("2", "2+w", 1)
    assert char_poly(B1.entries) == [1, -176, 3120]  # (x - 156)(x - 20)
    B2 = brandt_matrix("2", "2+w", 2)
    ev = sorted(np.linalg.eigvals(B2.entries).round().astype(int))
    assert ev == [-36, 780]
    B3 = brandt_matrix("3+w", "3", 1)
    ev = sorted(np.linalg.eigvals(B3.entries).real.round().astype(int))
    assert ev == [0, 88, 820]


def test_in_level_prime_rejected():
    with pytest.raises(UnsupportedOperation):
        brandt_matrix("2", "2", 1)
    with pytest.raises(UnsupportedOperation):
        brandt_matrix([("2+w", 2)], "2+w", 2)


def test_hecke_primes():
    assert [P.key for P in hecke_primes()] == ["2+0*w", "2+1*w", "3+0*w"]


def test_spectrum_independent_of_splitting(monkeypatch):
    P = prime_ideal("3+w")
    S = split_order(P, 1)
    R = S.ring
    g = np.array([[R.reduce(2), R.reduce(3)], [R.one, R.reduce(5)]])
    det = int(R.sub[R.mul[g[0, 0], g[1, 1]], R.mul[g[0, 1], g[1, 0]]])
    assert R.is_unit[det]
    ginv = R.mul[R.inv[det], np.array([[g[1, 1], R.neg[g[0, 1]]], [R.neg[g[1, 0]], g[0, 0]]])]
    from hilbert_siegel.residue_linalg import matmul

    images = np.array([matmul(R, matmul(R, g, im), ginv) for im in S.images])
    other = SplittingMap(P, 1, images)
    assert not np.array_equal(images, S.images)
    local_splitting.verify_splitting(other)
    before = {k: char_poly(brandt_matrix(P, k[0], k[1]).entries) for k in [("2", 1), ("3", 2)]}
    monkeypatch.setitem(local_splitting._cache, (P.key, 1), other)
    B_new = brandt_matrix(P, "2", 1)
    assert char_poly(B_new.entries) == before[("2", 1)]
    assert char_poly(brandt_matrix(P, "3", 2).entries) == before[("3", 2)]


def test_galois_conjugate_levels_share_spectra(levels):
    from hilbert_siegel.pipeline import compute_level

    a = levels("3+w")
    b = compute_level([(prime_ideal("4-w"), 1)])
    assert prime_ideal("4-w").norm == 11
    def tuples(res):
        return sorted(tuple(s.eigenvalues[k].a for k in sorted(s.eigenvalues)) for s in res.systems)
    assert tuples(a) == tuples(b)
