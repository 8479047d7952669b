"""Trace-form lattices of O_B and O_B^2, exact Fincke-Pohst enumeration,
and elements of prescribed reduced norm."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .base_ring import W0, W1, RingElement
from .quaternion_order import build_maximal_order


@dataclass(frozen=True)
class TraceFormLattice:
    """Z^rank with Q(v) = v^T gram v / 2 = Tr_{F/Q}(nr(v)) (summed over pairs)."""

    rank: int
    gram: tuple[tuple[int, ...], ...]

    @classmethod
    def of_order(cls, pairs: bool = False) -> "TraceFormLattice":
        G = build_maximal_order().gram
        if pairs:
            Z = np.zeros_like(G)
            G = np.block([[G, Z], [Z, G]])
        return cls(len(G), tuple(tuple(int(x) for x in r) for r in G))

    def value(self, v) -> int:
        G = np.array(self.gram, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return int(v @ G @ v) // 2

    def leading_minors(self) -> list[Fraction]:
        from .quaternion_order import _det

        n = self.rank
        return [_det([r[:k] for r in self.gram[:k]]) for k in range(1, n + 1)]


def _ldl(gram2) -> tuple[list[Fraction], list[list[Fraction]]]:
    n = len(gram2)
    q = [[Fraction(gram2[i][j], 2) for j in range(n)] for i in range(n)]
    for i in range(n):
        if q[i][i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    diag = [q[i][i] for i in range(n)]
    mu = [[q[i][j] if j > i else Fraction(0) for j in range(n)] for i in range(n)]
    return diag, mu


def _lcm(xs) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out


def short_vectors_gram(gram2, t: int, at_most: bool = False) -> list[tuple[int, ...]]:
    """All v with v^T gram2 v / 2 == t (or <= t), sorted lexicographically.

    Fincke-Pohst over the exact LDL decomposition; every bound is an
    integer comparison after clearing denominators.
    """
    n = len(gram2)
    if t < 0:
        return []
    diag, mu = _ldl(gram2)
    dd = _lcm(d.denominator for d in diag)
    delta = _lcm(mu[i][j].denominator for i in range(n) for j in range(i + 1, n))
    dn = [int(d * dd) for d in diag]
    m = [[int(mu[i][j] * delta) for j in range(n)] for i in range(n)]
    budget = t * dd * delta * delta
    out: list[tuple[int, ...]] = []
    x = [0] * n

    def rec(i: int, rem: int):
        if i < 0:
            if at_most or rem == 0:
                out.append(tuple(x))
            return
        C = 0
        mi = m[i]
        for j in range(i + 1, n):
            if x[j]:
                C += mi[j] * x[j]
        s = math.isqrt(rem // dn[i])
        lo = -((s + C) // delta)  # ceil((-s - C) / delta)
        hi = (s - C) // delta
        d = dn[i]
        for xi in range(lo, hi + 1):
            y = delta * xi + C
            r = rem - d * y * y
            if r >= 0:
                x[i] = xi
                rec(i - 1, r)
        x[i] = 0

    rec(n - 1, budget)
    out.sort()
    return out


def short_vectors(L: TraceFormLattice, t: int) -> np.ndarray:
    """Vectors of L with Q(v) = t, lexicographically sorted (v and -v both)."""
    vs = short_vectors_gram(L.gram, t)
    return np.array(vs, dtype=np.int64).reshape(len(vs), L.rank)


def box_vectors(gram2, t: int) -> np.ndarray:
    """Brute-force oracle: scan the box |x_i| <= sqrt(t * Ginv_ii)."""
    from .quaternion_order import _inv_F

    n = len(gram2)
    G = [[Fraction(gram2[i][j], 2) for j in range(n)] for i in range(n)]
    Ginv = _inv_F(G)
    bounds = [math.isqrt(int(t * Ginv[i][i].a)) for i in range(n)]
    G2 = np.array(gram2, dtype=np.int64)
    ranges = [np.arange(-b, b + 1) for b in bounds]
    # iterate the first coordinate(s) in Python, the rest vectorised
    split = max(0, n - 6)
    tail = np.stack(np.meshgrid(*ranges[split:], indexing="ij"), axis=-1).reshape(-1, n - split)
    hits = []
    import itertools

    for head in itertools.product(*ranges[:split]):
        v = np.concatenate([np.broadcast_to(np.array(head, dtype=np.int64), (len(tail), split)), tail], axis=1)
        q = np.einsum("ij,jk,ik->i", v, G2, v)
        hits.append(v[q == 2 * t])
    out = np.concatenate(hits) if hits else np.zeros((0, n), dtype=np.int64)
    order = np.lexsort(out.T[::-1])
    return out[order]


@lru_cache(maxsize=None)
def _single_by_trace(t: int) -> np.ndarray:
    return short_vectors(TraceFormLattice.of_order(False), t)


def _nr_equal(vecs: np.ndarray, lam: RingElement) -> np.ndarray:
    if len(vecs) == 0:
        return np.zeros(0, dtype=bool)
    nr = build_maximal_order().nr(vecs)
    return (nr[:, 0] == lam.a) & (nr[:, 1] == lam.b)


@lru_cache(maxsize=None)
def _single_of_norm(lam: RingElement) -> np.ndarray:
    if lam.is_zero():
        return np.zeros((1, 8), dtype=np.int64)
    vs = _single_by_trace(lam.trace())
    return vs[_nr_equal(vs, lam)]


def totally_positive_below(lam: RingElement) -> list[RingElement]:
    """All mu in O_F with mu and lam - mu each totally positive or zero."""
    l0, l1 = lam.embeddings()
    out = []
    s5 = math.sqrt(5)
    for b in range(math.floor(-l1 / s5) - 1, math.ceil(l0 / s5) + 2):
        lo = math.floor(max(-b * W0, -b * W1)) - 1
        hi = math.ceil(min(l0 - b * W0, l1 - b * W1)) + 1
        for a in range(lo, hi + 1):
            mu = RingElement(a, b)
            rest = lam - mu
            if (mu.is_zero() or mu.is_totally_positive()) and (rest.is_zero() or rest.is_totally_positive()):
                out.append(mu)
    return sorted(out, key=lambda x: (x.a, x.b))


def elements_of_norm(lam: RingElement, pairs: bool = False) -> np.ndarray:
    """All x in O_B (or O_B^2 when ``pairs``) with nr(x) (resp. nr(a)+nr(b)) = lam.

    Rows of the returned array are coordinate vectors of length 8 (or 16),
    sorted lexicographically.
    """
    lam = RingElement.coerce(lam)
    if not (lam.is_zero() or lam.is_totally_positive()):
        return np.zeros((0, 16 if pairs else 8), dtype=np.int64)
    if not pairs:
        return _single_of_norm(lam)
    chunks = []
    for mu in totally_positive_below(lam):
        A = _single_of_norm(mu)
        B = _single_of_norm(lam - mu)
        if len(A) and len(B):
            ia, ib = np.meshgrid(np.arange(len(A)), np.arange(len(B)), indexing="ij")
            chunks.append(np.concatenate([A[ia.ravel()], B[ib.ravel()]], axis=1))
    out = np.concatenate(chunks)
    return out[np.lexsort(out.T[::-1])]


def elements_of_norm_via_rank16(lam: RingElement) -> np.ndarray:
    """Pairs of norm lam straight from the rank-16 enumeration (slow path)."""
    lam = RingElement.coerce(lam)
    L = TraceFormLattice.of_order(True)
    vs = short_vectors(L, lam.trace())
    O = build_maximal_order()
    nr = O.nr(vs[:, :8]) + O.nr(vs[:, 8:])
    return vs[(nr[:, 0] == lam.a) & (nr[:, 1] == lam.b)]
