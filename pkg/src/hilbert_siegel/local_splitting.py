"""Explicit isomorphisms O_B/P^e ~ M_2(O_F/P^e) and the induced embedding
of 2x2 matrices over O_B into 4x4 symplectic similitudes."""

from __future__ import annotations

import random
import threading
import zlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .base_ring import PrimeIdeal, ResidueRing, RingElement, prime_ideal
from .quaternion_order import OrderBasis, build_maximal_order, similitude
from .residue_linalg import det2, matmul, rank_mod_p, symplectic_form

# Blockwise splitting of a 2x2 matrix over O_B gives a 4x4 matrix preserving
# diag(w, w), w = [[0, 1], [-1, 0]]; reordering the basis as (0, 2, 1, 3)
# turns that form into J = [[0, 1], [-1, 0]] in 2x2 blocks.
BASIS_PERMUTATION = (0, 2, 1, 3)

MAX_TRIES = 500


@lru_cache(maxsize=None)
def residue_ring(prime: PrimeIdeal, e: int) -> ResidueRing:
    """Shared ResidueRing instances so the lookup tables are built once."""
    return ResidueRing(prime, e)


class _QuatMod:
    """O_B/P^e with elements as length-4 index vectors over O_F/P^e."""

    def __init__(self, order: OrderBasis, R: ResidueRing):
        self.R = R
        self.c = np.array(
            [[[R.reduce(order.table[m][n][k]) for k in range(4)] for n in range(4)] for m in range(4)],
            dtype=np.int64,
        )
        conj = order.conj_matrix  # 8x8 over Z on the Z-basis
        # O_F-linear conjugation: conj(b_m) has coords row 2m of conj_matrix
        self.conj_c = np.array(
            [[R.reduce(RingElement(int(conj[2 * m, 2 * k]), int(conj[2 * m, 2 * k + 1]))) for k in range(4)]
             for m in range(4)],
            dtype=np.int64,
        )

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        R = self.R
        xy = R.mul[x[..., :, None], y[..., None, :]]  # (..., m, n)
        terms = R.mul[xy[..., :, :, None], self.c]  # (..., m, n, k)
        terms = terms.reshape(terms.shape[:-3] + (16, 4))
        acc = terms[..., 0, :]
        for i in range(1, 16):
            acc = R.add[acc, terms[..., i, :]]
        return acc

    def lin(self, x: np.ndarray, M: np.ndarray) -> np.ndarray:
        R = self.R
        terms = R.mul[x[..., :, None], M]
        acc = terms[..., 0, :]
        for i in range(1, 4):
            acc = R.add[acc, terms[..., i, :]]
        return acc

    def conj(self, x):
        return self.lin(x, self.conj_c)

    def scalar(self, s: int) -> np.ndarray:
        out = np.zeros(4, dtype=np.int64)
        out[0] = s
        return out

    def add(self, x, y):
        return self.R.add[x, y]

    def sub(self, x, y):
        return self.R.sub[x, y]

    def smul(self, s: int, x):
        return self.R.mul[s, x]

    def nr(self, x) -> int:
        return int(self.mul(x, self.conj(x))[..., 0])

    def tr(self, x) -> int:
        return int(self.add(x, self.conj(x))[..., 0])


@dataclass(frozen=True, eq=False)
class SplittingMap:
    """images[m] is the 2x2 image of the m-th O_F-basis element of O_B."""

    prime: PrimeIdeal
    e: int
    images: np.ndarray  # (4, 2, 2) ring indices

    @property
    def ring(self) -> ResidueRing:
        return residue_ring(self.prime, self.e)

    @property
    def modulus(self) -> tuple[PrimeIdeal, int]:
        return self.prime, self.e

    def split_coords(self, x: np.ndarray) -> np.ndarray:
        """Images of integer coordinate vectors (..., 8) as (..., 2, 2) index arrays."""
        R = self.ring
        x = np.asarray(x, dtype=np.int64)
        acc = None
        for m in range(4):
            r = R.reduce_array(x[..., 2 * m], x[..., 2 * m + 1])
            term = R.mul[r[..., None, None], self.images[m]]
            acc = term if acc is None else R.add[acc, term]
        return acc

    def split_matrix(self, u: np.ndarray) -> np.ndarray:
        """Blockwise split of (..., 2, 2, 8) matrices into (..., 4, 4) index arrays."""
        blocks = self.split_coords(u)  # (..., i, j, r, c)
        U = np.swapaxes(blocks, -3, -2)  # (..., i, r, j, c)
        U = U.reshape(U.shape[:-4] + (4, 4))
        p = list(BASIS_PERMUTATION)
        return U[..., p, :][..., :, p]

    def to_json(self) -> dict:
        R = self.ring
        imgs = [[[[R.lift(int(v)).a, R.lift(int(v)).b] for v in row] for row in img] for img in self.images]
        return {"prime": self.prime.key, "e": self.e, "images": imgs}

    @classmethod
    def from_json(cls, d: dict) -> "SplittingMap":
        P = prime_ideal(d["prime"])
        R = residue_ring(P, int(d["e"]))
        imgs = np.array(
            [[[R.reduce(RingElement(*v)) for v in row] for row in img] for img in d["images"]],
            dtype=np.int64,
        )
        out = cls(P, int(d["e"]), imgs)
        verify_splitting(out)
        return out


@dataclass(frozen=True, eq=False)
class SimilitudeMatrix:
    ring: ResidueRing
    matrix: np.ndarray  # (4, 4) indices
    similitude: int  # index of nu

    def is_symplectic_similitude(self) -> bool:
        return check_similitude(self.ring, self.matrix, self.similitude)


def check_similitude(R: ResidueRing, g: np.ndarray, nu) -> bool:
    """Whether g J g^t = nu J for each matrix in the batch."""
    J = symplectic_form(R)
    lhs = matmul(R, matmul(R, g, J), np.swapaxes(g, -1, -2))
    rhs = R.mul[np.asarray(nu)[..., None, None], J]
    return bool(np.all(lhs == rhs))


def _seed(prime: PrimeIdeal) -> int:
    return zlib.crc32(f"split:{prime.key}".encode())


def lift_idempotent(Q: _QuatMod, eps: np.ndarray) -> np.ndarray:
    """Lift an idempotent mod P to one mod P^e by iterating eps <- 3 eps^2 - 2 eps^3.

    Each step doubles the P-adic precision, so 2e + 2 rounds is plenty.
    """
    R = Q.R
    three, two = R.reduce(3), R.reduce(2)
    for _ in range(2 * R.e + 2):
        e2 = Q.mul(eps, eps)
        eps = Q.sub(Q.smul(three, e2), Q.smul(two, Q.mul(e2, eps)))
    return eps


def _find_splitting(order: OrderBasis, prime: PrimeIdeal, e: int) -> np.ndarray:
    R = residue_ring(prime, e)
    Q = _QuatMod(order, R)
    F = residue_ring(prime, 1)
    to_f = R.to_residue_field()
    rng = random.Random(_seed(prime))
    one = Q.scalar(R.one)

    def corner(y):  # nonzero mod P
        return bool(np.any(to_f[y] != 0))

    for _ in range(MAX_TRIES):
        x = np.array([rng.randrange(R.size) for _ in range(4)], dtype=np.int64)
        t, n = int(to_f[Q.tr(x)]), int(to_f[Q.nr(x)])
        # roots of X^2 - tX + n in the residue field
        roots = [r for r in range(F.size)
                 if F.add[F.sub[F.mul[r, r], F.mul[t, r]], n] == 0]
        if len(roots) != 2:
            continue
        r1, r2 = (int(np.flatnonzero(to_f == r)[0]) for r in roots)
        d = R.inv[R.sub[r1, r2]]
        eps = lift_idempotent(Q, Q.smul(d, Q.sub(x, Q.scalar(r2))))
        if not np.array_equal(Q.mul(eps, eps), eps):
            continue
        f = Q.sub(one, eps)
        e12 = None
        for _ in range(MAX_TRIES):
            b = np.array([rng.randrange(R.size) for _ in range(4)], dtype=np.int64)
            y = Q.mul(Q.mul(eps, b), f)
            if corner(y):
                e12 = y
                break
        if e12 is None:
            continue
        e21 = None
        for _ in range(MAX_TRIES):
            c = np.array([rng.randrange(R.size) for _ in range(4)], dtype=np.int64)
            z = Q.mul(Q.mul(f, c), eps)
            prod = Q.mul(e12, z)  # = lam * eps
            k0 = int(np.flatnonzero(R.is_unit[eps])[0])
            lam = int(R.mul[prod[k0], R.inv[eps[k0]]])
            if R.is_unit[lam] and np.array_equal(Q.smul(lam, eps), prod):
                e21 = Q.smul(int(R.inv[lam]), z)
                break
        if e21 is None:
            continue
        units = {(0, 0): eps, (0, 1): e12, (1, 0): e21, (1, 1): f}
        k0 = int(np.flatnonzero(R.is_unit[eps])[0])
        e_inv = int(R.inv[eps[k0]])
        images = np.zeros((4, 2, 2), dtype=np.int64)
        ok = True
        for m in range(4):
            bm = np.zeros(4, dtype=np.int64)
            bm[m] = R.one
            for i in range(2):
                for j in range(2):
                    y = Q.mul(Q.mul(units[(0, i)], bm), units[(j, 0)])
                    s = int(R.mul[y[k0], e_inv])
                    if not np.array_equal(Q.smul(s, eps), y):
                        ok = False
                    images[m, i, j] = s
        if ok:
            return images
    raise RuntimeError(f"no splitting found for {prime.label}^{e}")  # pragma: no cover


def verify_splitting(S: SplittingMap, order: OrderBasis | None = None) -> None:
    """Assert the homomorphism, unit, det, trace and surjectivity properties."""
    order = order or build_maximal_order()
    R = S.ring
    Q = _QuatMod(order, R)
    I2 = np.array([[R.one, 0], [0, R.one]], dtype=np.int64)
    assert np.array_equal(S.images[0], I2), "split(1) != 1"

    def img(v):
        acc = np.zeros((2, 2), dtype=np.int64)
        for k in range(4):
            acc = R.add[acc, R.mul[v[k], S.images[k]]]
        return acc

    for m in range(4):
        for n in range(4):
            lhs = img(Q.c[m, n])
            rhs = matmul(R, S.images[m], S.images[n])
            assert np.array_equal(lhs, rhs), "not multiplicative"
        bm = np.zeros(4, dtype=np.int64)
        bm[m] = R.one
        assert int(det2(R, S.images[m])) == Q.nr(bm), "det != nr"
        assert int(R.add[S.images[m, 0, 0], S.images[m, 1, 1]]) == Q.tr(bm), "trace != tr"
    assert rank_mod_p(R, S.images.reshape(4, 4)) == 4, "not surjective"


_lock = threading.Lock()
_cache: dict[tuple[str, int], SplittingMap] = {}


def split_order(prime, e: int = 1) -> SplittingMap:
    """The (memoised, deterministic) splitting of O_B modulo prime^e."""
    if e < 1:
        raise ValueError("exponent must be >= 1")
    if not isinstance(prime, PrimeIdeal):
        prime = prime_ideal(prime)
    key = (prime.key, e)
    with _lock:
        S = _cache.get(key)
        if S is None:
            order = build_maximal_order()
            S = SplittingMap(prime, e, _find_splitting(order, prime, e))
            verify_splitting(S, order)
            _cache[key] = S
    return S


def install_splitting(S: SplittingMap) -> SplittingMap:
    """Register a splitting loaded from the cache (first one wins)."""
    with _lock:
        return _cache.setdefault((S.prime.key, S.e), S)


def embed_similitude(m: np.ndarray, S: SplittingMap, check: bool = True) -> SimilitudeMatrix:
    """Image of a 2x2 matrix over O_B (shape (2, 2, 8)) in GSp_4(O_F/P^e)."""
    order = build_maximal_order()
    m = np.asarray(m, dtype=np.int64)
    R = S.ring
    sim = similitude(order, m)
    nu_vec = order.scalar(RingElement(int(sim[0, 0, 0]), int(sim[0, 0, 1])))
    if check and not (
        np.array_equal(sim[0, 0], nu_vec) and np.array_equal(sim[1, 1], nu_vec)
        and not sim[0, 1].any() and not sim[1, 0].any()
    ):
        raise ValueError("matrix is not a similitude: m conj(m)^t is not scalar")
    nu = R.reduce(RingElement(int(nu_vec[0]), int(nu_vec[1])))
    g = S.split_matrix(m)
    if check:
        assert check_similitude(R, g, nu)
    return SimilitudeMatrix(R, g, nu)


def embed_batch(u: np.ndarray, S: SplittingMap) -> np.ndarray:
    """Vectorised embed without the similitude check: (n, 2, 2, 8) -> (n, 4, 4)."""
    return S.split_matrix(np.asarray(u, dtype=np.int64))
