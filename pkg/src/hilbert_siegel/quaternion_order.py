"""The totally definite quaternion algebra B = (-1,-1 / F), its maximal
order (the icosian ring), the norm-one units and the finite group Gamma.

Elements of O_B are handled in bulk as integer vectors of length 8: the
coordinates (a_0, b_0, ..., a_3, b_3) of sum_m (a_m + b_m w) * basis[m]
on a fixed O_F-basis of O_B whose first element is 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .base_ring import FieldElement, RingElement, factor_ideal


@dataclass(frozen=True)
class Quaternion:
    """x0 + x1 i + x2 j + x3 k with coefficients in F."""

    x0: FieldElement
    x1: FieldElement
    x2: FieldElement
    x3: FieldElement

    @classmethod
    def make(cls, *xs) -> "Quaternion":
        return cls(*(FieldElement.coerce(x) for x in xs))

    @property
    def coeffs(self) -> tuple[FieldElement, ...]:
        return (self.x0, self.x1, self.x2, self.x3)

    def __add__(self, o):
        return Quaternion(*(p + q for p, q in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o):
        return Quaternion(*(p - q for p, q in zip(self.coeffs, o.coeffs)))

    def __neg__(self):
        return Quaternion(*(-p for p in self.coeffs))

    def __mul__(self, o):
        if not isinstance(o, Quaternion):
            s = FieldElement.coerce(o)
            return Quaternion(*(s * p for p in self.coeffs))
        a0, a1, a2, a3 = self.coeffs
        b0, b1, b2, b3 = o.coeffs
        return Quaternion(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )

    def __rmul__(self, s):
        s = FieldElement.coerce(s)
        return Quaternion(*(s * p for p in self.coeffs))

    def conj(self) -> "Quaternion":
        return Quaternion(self.x0, -self.x1, -self.x2, -self.x3)

    def nr(self) -> FieldElement:
        return sum((c * c for c in self.coeffs), FieldElement())

    def tr(self) -> FieldElement:
        return self.x0 * 2

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __repr__(self):
        return "Quaternion(" + ", ".join(f"{c.a}+{c.b}w" for c in self.coeffs) + ")"


ONE_Q = Quaternion.make(1, 0, 0, 0)
I_Q = Quaternion.make(0, 1, 0, 0)
J_Q = Quaternion.make(0, 0, 1, 0)
K_Q = Quaternion.make(0, 0, 0, 1)
LIPSCHITZ = (ONE_Q, I_Q, J_Q, K_Q)
W = FieldElement(0, 1)


# --- Z-lattices in B = Q^8 ------------------------------------------------

def _qvec(q: Quaternion) -> list[Fraction]:
    out = []
    for c in q.coeffs:
        out += [c.a, c.b]
    return out


def _vecq(v) -> Quaternion:
    return Quaternion(*(FieldElement(v[2 * m], v[2 * m + 1]) for m in range(4)))


def hnf(rows: list[list[int]]) -> list[list[int]]:
    """Row Hermite normal form of an integer matrix (nonzero rows only)."""
    A = [list(r) for r in rows if any(r)]
    if not A:
        return []
    n = len(A[0])
    out = []
    col = 0
    while A and col < n:
        nz = [r for r in A if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // piv[col]
                r2 = [x - q * y for x, y in zip(r, piv)]
                if r2[col] != 0:
                    rest.append(r2)
                elif any(r2):
                    A.append(r2)
            nz = [piv] + rest
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        A = [r for r in A if r[col] == 0 and any(r)]
        out.append(piv)
        col += 1
    # reduce above the pivots
    for i, r in enumerate(out):
        c = next(k for k, x in enumerate(r) if x)
        for j in range(i):
            q = out[j][c] // r[c]
            if q:
                out[j] = [x - q * y for x, y in zip(out[j], r)]
    return out


class ZLattice:
    """Full-rank Z-lattice in B, stored as HNF rows scaled by ``den``."""

    def __init__(self, gens: list[Quaternion]):
        vecs = [_qvec(g) for g in gens]
        den = 1
        for v in vecs:
            for x in v:
                den = den * x.denominator // np.gcd(den, x.denominator)
        rows = hnf([[int(x * den) for x in v] for v in vecs])
        self.den = int(den)
        self.rows = rows
        if len(rows) != 8:
            raise ValueError("lattice is not of full rank")

    def basis(self) -> list[Quaternion]:
        return [_vecq([Fraction(x, self.den) for x in r]) for r in self.rows]

    def covolume(self) -> Fraction:
        d = 1
        for i, r in enumerate(self.rows):
            d *= r[i]
        return Fraction(d, self.den ** 8)

    def __contains__(self, q: Quaternion) -> bool:
        v = [x * self.den for x in _qvec(q)]
        for i, r in enumerate(self.rows):
            if v[i].denominator != 1:
                return False
            k = v[i] / r[i]
            if k.denominator != 1:
                return False
            v = [x - k * y for x, y in zip(v, r)]
        return all(x == 0 for x in v)

    def __eq__(self, other):
        return self.den == other.den and self.rows == other.rows


def ring_closure(gens: list[Quaternion], max_den: int = 64) -> ZLattice | None:
    """Smallest ring containing the O_F-span of gens, or None if the
    closure is not a lattice with denominator <= max_den."""
    basis = ZLattice(gens + [W * g for g in gens]).basis()
    while True:
        prods = [x * y for x in basis for y in basis]
        L = ZLattice(basis + prods + [W * p for p in prods])
        if L.den > max_den:
            return None
        new = L.basis()
        if ZLattice(new) == ZLattice(basis):
            return L
        basis = new


def z_discriminant(basis: list[Quaternion]) -> Fraction:
    """det of Tr_{F/Q}(trd(x_i x_j)) over a Z-basis."""
    G = [[(x * y).tr().trace() for y in basis] for x in basis]
    return _det(G)


def _det(M) -> Fraction:
    M = [[Fraction(x) for x in r] for r in M]
    n = len(M)
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f:
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return d


def _det_F(M) -> FieldElement:
    M = [[FieldElement.coerce(x) for x in r] for r in M]
    n = len(M)
    d = FieldElement(1)
    for c in range(n):
        p = next((r for r in range(c, n) if not M[r][c].is_zero()), None)
        if p is None:
            return FieldElement(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d = d * M[c][c]
        inv = M[c][c].inverse()
        for r in range(c + 1, n):
            f = M[r][c] * inv
            if not f.is_zero():
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return d


def reduced_discriminant(of_basis: list[Quaternion]) -> RingElement:
    """Generator of the reduced discriminant of the O_F-order spanned by
    ``of_basis`` (the ideal whose square is det(trd(b_i b_j)))."""
    d = _det_F([[(x * y).tr() for y in of_basis] for x in of_basis])
    d = d.to_ring()
    out = RingElement(1, 0)
    for P, e in factor_ideal(d):
        if e % 2:
            raise ArithmeticError("discriminant is not a square ideal")
        out = out * P.generator ** (e // 2)
    return out


def saturate_lipschitz() -> ZLattice:
    """Enlarge the Lipschitz order at (2) until the discriminant is a unit.

    Each round tries the candidates x = y/2 with y in the current order
    (taken mod 2), keeps the first one with integral trace and norm whose
    ring closure is again an order, and repeats.
    """
    target = Fraction(5) ** 4  # d_F^4 * N(disc)^2 with disc = (1)
    gens = list(LIPSCHITZ)
    order = ring_closure(gens)
    while abs(z_discriminant(order.basis())) != target:
        basis = order.basis()
        found = None
        for bits in itertools.product((0, 1), repeat=8):
            if not any(bits):
                continue
            y = Quaternion.make(0, 0, 0, 0)
            for c, b in zip(bits, basis):
                if c:
                    y = y + b
            x = y * Fraction(1, 2)
            if x in order:
                continue
            if not (x.tr().is_integral() and x.nr().is_integral()):
                continue
            cand = ring_closure(basis + [x])
            if cand is None:
                continue
            if all(b.tr().is_integral() and b.nr().is_integral() for b in cand.basis()):
                found = cand
                break
        if found is None:
            raise RuntimeError("saturation at (2) failed")
        order = found
    return order


# --- the maximal order -------------------------------------------------

class OrderBasis:
    """O_F-basis of the maximal order plus integer structure tensors."""

    def __init__(self, basis: list[Quaternion]):
        assert basis[0] == ONE_Q
        self.basis = list(basis)
        # F-coordinates of the basis, inverted for coordinate extraction
        self._M = [[c for c in b.coeffs] for b in basis]  # row m = basis[m]
        self._Minv = _inv_F(self._M)
        self.zbasis = [b for b in basis for b in (b, W * b)]
        zb = self.zbasis
        T = np.zeros((8, 8, 8), dtype=np.int64)
        for i, x in enumerate(zb):
            for j, y in enumerate(zb):
                T[i, j] = self.coords(x * y)
        self.mul_tensor = T
        C = np.zeros((8, 8), dtype=np.int64)
        for i, x in enumerate(zb):
            C[i] = self.coords(x.conj())
        self.conj_matrix = C
        # structure constants over O_F: b_m b_n = sum_k c[m][n][k] b_k
        self.table = [
            [
                [RingElement(*self.coords(basis[m] * basis[n])[2 * k: 2 * k + 2]) for k in range(4)]
                for n in range(4)
            ]
            for m in range(4)
        ]

    def coords(self, q: Quaternion) -> list[int]:
        """Integer coordinates of q; raises if q is not in the order."""
        x = q.coeffs
        # q = sum_m lam_m basis[m]  <=>  x = lam @ M  =>  lam = x @ Minv
        out = []
        for m in range(4):
            lam = sum((x[r] * self._Minv[r][m] for r in range(4)), FieldElement())
            if not lam.is_integral():
                raise ValueError(f"{q} is not in O_B")
            out += [int(lam.a), int(lam.b)]
        return out

    def contains(self, q: Quaternion) -> bool:
        try:
            self.coords(q)
        except ValueError:
            return False
        return True

    def quaternion(self, v) -> Quaternion:
        out = Quaternion.make(0, 0, 0, 0)
        for m in range(4):
            lam = FieldElement(int(v[2 * m]), int(v[2 * m + 1]))
            out = out + lam * self.basis[m]
        return out

    # bulk arithmetic ------------------------------------------------------
    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Products of coordinate vectors (broadcasting over leading axes)."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        xy = x[..., :, None] * y[..., None, :]
        return np.tensordot(xy, self.mul_tensor, axes=([-2, -1], [0, 1]))

    def conj(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.int64) @ self.conj_matrix

    def nr(self, x: np.ndarray) -> np.ndarray:
        """Reduced norms as (..., 2) arrays (a, b) of a + b w."""
        p = self.mul(x, self.conj(x))
        return p[..., :2]

    def tr(self, x: np.ndarray) -> np.ndarray:
        p = np.asarray(x, dtype=np.int64) + self.conj(x)
        return p[..., :2]

    def scalar(self, s: RingElement) -> np.ndarray:
        v = np.zeros(8, dtype=np.int64)
        v[0], v[1] = s.a, s.b
        return v

    def scalar_mul(self, s: RingElement, x: np.ndarray) -> np.ndarray:
        return self.mul(self.scalar(s), x)

    def is_divisible(self, x: np.ndarray, n: RingElement) -> np.ndarray:
        """Whether each x lies in n*O_B."""
        y = self.scalar_mul(n.conj(), x)
        N = abs(n.norm())
        return np.all(y % N == 0, axis=-1)

    def exact_div(self, x: np.ndarray, n: RingElement) -> np.ndarray:
        y = self.scalar_mul(n.conj(), x)
        N = n.norm()
        assert np.all(y % N == 0)
        return y // N

    @cached_property
    def gram(self) -> np.ndarray:
        """2 * Gram matrix of Q(v) = Tr_{F/Q}(nr(v)) on the Z-basis."""
        zb = self.zbasis
        G = np.zeros((8, 8), dtype=np.int64)
        for i, x in enumerate(zb):
            for j, y in enumerate(zb):
                G[i, j] = int((x * y.conj()).tr().trace())
        return G

    def trace_form(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        return np.einsum("...i,ij,...j->...", v, self.gram, v) // 2


def _inv_F(M):
    n = len(M)
    A = [[FieldElement.coerce(x) for x in r] + [FieldElement(int(i == j)) for j in range(n)]
         for i, r in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if not A[r][c].is_zero())
        A[c], A[p] = A[p], A[c]
        inv = A[c][c].inverse()
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and not A[r][c].is_zero():
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [r[n:] for r in A]


@lru_cache(maxsize=None)
def build_maximal_order() -> OrderBasis:
    """Maximal order of (-1,-1 / F) with an O_F-basis made of units."""
    from .lattice import short_vectors_gram

    order = saturate_lipschitz()
    zb = order.basis()
    # units: vectors with Tr(nr) = 2 on the Z-basis, then nr = 1 exactly
    G = [[int((x * y.conj()).tr().trace()) for y in zb] for x in zb]
    units = []
    for v in short_vectors_gram(G, 2):
        q = Quaternion.make(0, 0, 0, 0)
        for c, b in zip(v, zb):
            if c:
                q = q + b * c
        if q.nr() == FieldElement(1):
            units.append(q)
    units.sort(key=lambda q: [(c.a, c.b) for c in q.coeffs], reverse=True)
    assert ONE_Q in units and len(units) == 120
    target = order.covolume()
    rest = [u for u in units if u != ONE_Q]
    for combo in itertools.combinations(rest, 3):
        cand = [ONE_Q, *combo]
        try:
            L = ZLattice(cand + [W * c for c in cand])
        except ValueError:
            continue
        if L.covolume() == target:
            return OrderBasis(cand)
    raise RuntimeError("no O_F-basis of units found")


# --- units and Gamma ---------------------------------------------------

class UnitGroup:
    """The 120 norm-one units of O_B, with a multiplication table."""

    def __init__(self, order: OrderBasis, vecs: np.ndarray):
        self.order = order
        self.vecs = np.asarray(vecs, dtype=np.int64)
        self.index = {tuple(v): i for i, v in enumerate(self.vecs.tolist())}
        prods = order.mul(self.vecs[:, None, :], self.vecs[None, :, :])
        self.table = np.array(
            [[self.index[tuple(p)] for p in row] for row in prods.tolist()], dtype=np.int64
        )
        self.identity = self.index[tuple(order.scalar(RingElement(1)).tolist())]
        self.inverse = np.argmax(self.table == self.identity, axis=1)
        self.neg = np.array([self.index[tuple((-v).tolist())] for v in self.vecs])

    def __len__(self):
        return len(self.vecs)

    @cached_property
    def generators(self) -> tuple[int, int]:
        """Two units generating the whole group."""
        n = len(self)
        for a in range(n):
            for b in range(a + 1, n):
                seen = {self.identity}
                frontier = [self.identity]
                while frontier:
                    nxt = []
                    for x in frontier:
                        for g in (a, b):
                            y = int(self.table[x, g])
                            if y not in seen:
                                seen.add(y)
                                nxt.append(y)
                    frontier = nxt
                if len(seen) == n:
                    return a, b
        raise RuntimeError("unit group is not 2-generated")


@lru_cache(maxsize=None)
def unit_group() -> UnitGroup:
    from .lattice import elements_of_norm

    O = build_maximal_order()
    return UnitGroup(O, elements_of_norm(RingElement(1)))


@dataclass(frozen=True)
class GammaElement:
    """diag(u, v) (swapped=False) or antidiag(u, v) = [[0, u], [v, 0]]."""

    u: int
    v: int
    swapped: bool

    def matrix(self, U: UnitGroup | None = None) -> np.ndarray:
        U = U or unit_group()
        m = np.zeros((2, 2, 8), dtype=np.int64)
        if self.swapped:
            m[0, 1], m[1, 0] = U.vecs[self.u], U.vecs[self.v]
        else:
            m[0, 0], m[1, 1] = U.vecs[self.u], U.vecs[self.v]
        return m

    def __mul__(self, o: "GammaElement") -> "GammaElement":
        t = unit_group().table
        if not self.swapped and not o.swapped:
            return GammaElement(int(t[self.u, o.u]), int(t[self.v, o.v]), False)
        if not self.swapped and o.swapped:
            return GammaElement(int(t[self.u, o.u]), int(t[self.v, o.v]), True)
        if self.swapped and not o.swapped:
            # [[0,u],[v,0]] diag(a,b) = [[0, u b], [v a, 0]]
            return GammaElement(int(t[self.u, o.v]), int(t[self.v, o.u]), True)
        return GammaElement(int(t[self.u, o.v]), int(t[self.v, o.u]), False)

    def canonical(self) -> "GammaElement":
        U = unit_group()
        if U.neg[self.u] < self.u:
            return GammaElement(int(U.neg[self.u]), int(U.neg[self.v]), self.swapped)
        return self


def gamma_group() -> list[GammaElement]:
    """Gamma modulo the central +-1: 2 * 120^2 / 2 = 14400 elements."""
    U = unit_group()
    out = []
    for s in (False, True):
        for u in range(len(U)):
            if U.neg[u] < u:
                continue
            for v in range(len(U)):
                out.append(GammaElement(u, v, s))
    return out


def gamma_generators() -> list[np.ndarray]:
    """A small generating set of Gamma as 2x2 matrices over O_B."""
    U = unit_group()
    a, b = U.generators
    one = U.identity
    return [
        GammaElement(a, one, False).matrix(U),
        GammaElement(b, one, False).matrix(U),
        GammaElement(one, one, True).matrix(U),
    ]


# --- 2x2 matrices over O_B ----------------------------------------------

def mat_mul(order: OrderBasis, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Product of 2x2 matrices over O_B (shape (..., 2, 2, 8))."""
    p = order.mul(x[..., :, :, None, :], y[..., None, :, :, :])  # (...,i,k,j,8)
    return p.sum(axis=-3)


def mat_conj_transpose(order: OrderBasis, x: np.ndarray) -> np.ndarray:
    return np.swapaxes(order.conj(x), -3, -2)


def similitude(order: OrderBasis, x: np.ndarray) -> np.ndarray:
    """x * conj(x)^t as a (..., 2, 2, 8) array."""
    return mat_mul(order, x, mat_conj_transpose(order, x))


def hermitian_product(order: OrderBasis, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    """a conj(c) + b conj(d) for rows r1 = (a, b), r2 = (c, d) of shape (..., 2, 8)."""
    return order.mul(r1, order.conj(r2)).sum(axis=-2)


def inner_form_F(order: OrderBasis, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    """F-valued polarisation <u, v> = tr(a conj(c) + b conj(d)) / 2 as 2*(a,b) pairs.

    Vanishing of the B-valued product implies vanishing of this one; the
    converse fails, so this is only a pre-filter.
    """
    return order.tr(hermitian_product(order, r1, r2))
