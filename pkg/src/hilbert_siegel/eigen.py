"""Exact decomposition of commuting Brandt matrices into eigensystems.

Candidate roots come from mpmath; every accepted factor is verified by exact
polynomial division and every eigenvector by exact arithmetic in Q(w_D).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .base_ring import QuadExtElement, quadratic_roots

Poly = list  # integer (or Fraction) coefficients, highest degree first
Mat = list  # list of rows of Fractions


# --- polynomials ------------------------------------------------------------

def char_poly(M) -> list[int]:
    """det(xI - M) by Faddeev-LeVerrier; exact over the integers."""
    A = _to_frac(M)
    n = len(A)
    if any(len(r) != n for r in A):
        raise ValueError("matrix is not square")
    coeffs = [Fraction(1)]
    Mk = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        AM = _mm(A, Mk)
        c = -sum(AM[i][i] for i in range(n)) / k
        coeffs.append(c)
        Mk = [[AM[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    return [_int_if(c) for c in coeffs]


def _int_if(c: Fraction):
    return int(c) if c.denominator == 1 else c


def poly_eval(p: Poly, x):
    acc = 0
    for c in p:
        acc = acc * x + c
    return acc


def poly_divmod(p: Poly, d: Poly) -> tuple[Poly, Poly]:
    p = [Fraction(c) for c in p]
    d = [Fraction(c) for c in d]
    if len(p) < len(d):
        return [Fraction(0)], p
    q = []
    r = p[:]
    for i in range(len(p) - len(d) + 1):
        f = r[i] / d[0]
        q.append(f)
        for j in range(len(d)):
            r[i + j] -= f * d[j]
    rem = r[len(p) - len(d) + 1:]
    return [_int_if(c) for c in q], [_int_if(c) for c in rem]


def _trim(p: Poly) -> Poly:
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def poly_gcd(a: Poly, b: Poly) -> Poly:
    a, b = _trim(list(a)), _trim(list(b))
    while any(c != 0 for c in b):
        _, r = poly_divmod(a, b)
        a, b = b, _trim(r)
    lead = Fraction(a[0])
    return [_int_if(Fraction(c) / lead) for c in a]


def poly_derivative(p: Poly) -> Poly:
    n = len(p) - 1
    return [c * (n - i) for i, c in enumerate(p[:-1])] or [0]


def divides(d: Poly, p: Poly) -> bool:
    _, r = poly_divmod(p, d)
    return all(c == 0 for c in r)


def numeric_roots(p: Poly, dps: int = 60) -> list:
    """Roots of a squarefree polynomial, escalating precision on failure."""
    if len(p) <= 1:
        return []
    for attempt in range(6):
        with mpmath.workdps(dps << attempt):
            try:
                return list(mpmath.polyroots([mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator
                                              for c in p], maxsteps=200 * (attempt + 1),
                                             extraprec=2 * dps << attempt))
            except mpmath.libmp.NoConvergence:
                continue
    raise RuntimeError("root isolation failed")  # pragma: no cover


def small_factors(p: Poly) -> tuple[list[tuple[Poly, int]], Poly]:
    """Monic integer factors of degree 1 or 2 (irreducible) with multiplicities.

    Returns ([(factor, multiplicity), ...], remaining cofactor).
    """
    p = list(p)
    g = poly_gcd(p, poly_derivative(p))
    sq, _ = poly_divmod(p, g)
    roots = numeric_roots(sq)
    found: list[Poly] = []
    used = [False] * len(roots)
    for i, r in enumerate(roots):
        if abs(mpmath.im(r)) > 1e-20:
            continue
        c = int(mpmath.nint(mpmath.re(r)))
        if [1, -c] not in found and poly_eval(sq, c) == 0:
            found.append([1, -c])
            used[i] = True
    for i in range(len(roots)):
        if used[i]:
            continue
        for j in range(i + 1, len(roots)):
            if used[j] or used[i]:
                continue
            t = mpmath.re(roots[i] + roots[j])
            n = mpmath.re(roots[i] * roots[j])
            ti, ni = int(mpmath.nint(t)), int(mpmath.nint(n))
            if abs(t - ti) > 1e-6 or abs(n - ni) > 1e-6:
                continue
            f = [1, -ti, ni]
            disc = ti * ti - 4 * ni
            if disc >= 0 and math.isqrt(disc) ** 2 == disc:
                continue
            if f not in found and divides(f, sq):
                found.append(f)
                used[i] = used[j] = True
    out = []
    rest = p
    for f in found:
        m = 0
        while divides(f, rest):
            rest, _ = poly_divmod(rest, f)
            m += 1
        out.append((f, m))
    out.sort(key=lambda fm: (len(fm[0]), [-float(c) for c in fm[0][1:]]))
    return out, rest


# --- rational linear algebra ---------------------------------------------

def _mm(A: Mat, B: Mat) -> Mat:
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col) if a and b), Fraction(0)) for col in Bt] for row in A]


def _to_frac(M) -> Mat:
    return [[Fraction(x) for x in row] for row in (M.tolist() if isinstance(M, np.ndarray) else M)]


def rref(M: Mat) -> tuple[Mat, list[int]]:
    A = [r[:] for r in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    piv = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return A, piv


def nullspace(M: Mat) -> Mat:
    """Kernel basis as columns (n x k), identity on the free coordinates."""
    n = len(M[0])
    R, piv = rref(M)
    free = [c for c in range(n) if c not in piv]
    V = [[Fraction(0)] * len(free) for _ in range(n)]
    for j, f in enumerate(free):
        V[f][j] = Fraction(1)
        for i, pc in enumerate(piv):
            V[pc][j] = -R[i][f]
    return V


def _poly_of_matrix(p: Poly, A: Mat) -> Mat:
    n = len(A)
    acc = [[Fraction(0)] * n for _ in range(n)]
    for c in p:
        acc = _mm(acc, A)
        for i in range(n):
            acc[i][i] += c
    return acc


def _restrict(A: Mat, W: Mat) -> Mat:
    """Matrix of A on the invariant subspace spanned by the columns of W."""
    k = len(W[0])
    AW = _mm(A, W)
    # W has an identity block on some rows; read coordinates there
    rows = _identity_rows(W)
    return [[AW[rows[i]][j] for j in range(k)] for i in range(k)]


def _identity_rows(W: Mat) -> list[int]:
    k = len(W[0])
    rows = []
    for j in range(k):
        for i, r in enumerate(W):
            if r[j] == 1 and all(r[jj] == 0 for jj in range(k) if jj != j) and i not in rows:
                rows.append(i)
                break
    assert len(rows) == k
    return rows


# --- eigensystems -----------------------------------------------------------

@dataclass
class EigenSystem:
    level: str
    field_disc: int
    eigenvalues: dict  # (prime key, kind) -> QuadExtElement
    is_eisenstein: bool = False
    multiplicity: int = 1
    eigenvector: list = field(default_factory=list, repr=False)

    @property
    def degree(self) -> int:
        return 1 if self.field_disc == 1 else 2

    def conj(self) -> "EigenSystem":
        return EigenSystem(self.level, self.field_disc, {k: v.conj() for k, v in self.eigenvalues.items()},
                           self.is_eisenstein, self.multiplicity, [x.conj() for x in self.eigenvector])

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "disc": self.field_disc,
            "eisenstein": self.is_eisenstein,
            "eigenvalues": {f"{p}:{k}": v.to_json() for (p, k), v in self.eigenvalues.items()},
        }


@dataclass
class ResidualBlock:
    """Part of the cusp space not split into multiplicity-one systems of degree <= 2.

    ``eigenvalues`` is set when the block is a repeated rational system that
    the computed operators cannot separate.
    """

    level: str
    dimension: int
    note: str = "Hecke field degree > 2"
    eigenvalues: dict | None = None

    def to_json(self) -> dict:
        out = {"level": self.level, "dimension": self.dimension, "note": self.note}
        if self.eigenvalues is not None:
            out["eigenvalues"] = {f"{p}:{k}": v.to_json() for (p, k), v in self.eigenvalues.items()}
        return out


def _simple_system(level, names, mats: list[Mat], V: Mat, j: int, f: Poly) -> EigenSystem:
    """Eigen system on a simple block of dimension 1 or 2 (f = char poly of mats[j])."""
    if len(f) == 2:
        vals = {n: QuadExtElement(1, m[0][0]) for n, m in zip(names, mats)}
        vec = [QuadExtElement(1, r[0]) for r in V]
        return EigenSystem(level, 1, vals, eigenvector=vec)
    lam, _ = quadratic_roots(-int(f[1]), int(f[2]))
    D = lam.disc
    A = mats[j]
    # eigenvector of the 2x2 block for lam
    if A[0][1] != 0:
        v = [QuadExtElement(D, A[0][1]), lam - A[0][0]]
    else:
        v = [lam - A[1][1], QuadExtElement(D, A[1][0])]
    c = 0 if not v[0].is_zero() else 1
    vals = {}
    for n, m in zip(names, mats):
        Av = m[c][0] * v[0] + m[c][1] * v[1]
        vals[n] = Av / v[c]
    vec = [r[0] * v[0] + r[1] * v[1] for r in V]
    return EigenSystem(level, D, vals, eigenvector=vec)


def _decompose(level, names, mats, V, start, out_sys, out_res):
    k = len(mats[0])
    for i in range(start, len(mats)):
        A = mats[i]
        p = char_poly(A)
        factors, rest = small_factors(p)
        pieces = [(f, m) for f, m in factors]
        deg_rest = len(rest) - 1
        if deg_rest > 0:
            if not factors:
                out_res.append(ResidualBlock(level, k))
                return
            out_res.append(ResidualBlock(level, deg_rest))
        if len(pieces) == 1 and deg_rest == 0:
            f, m = pieces[0]
            if m == 1:
                out_sys.append(_simple_system(level, names, mats, V, i, f))
                return
            continue  # a single repeated factor: try the next operator
        for f, m in pieces:
            W = nullspace(_poly_of_matrix(f, A))
            assert len(W[0]) == m * (len(f) - 1)
            sub = [_restrict(M, W) for M in mats]
            _decompose(level, names, sub, _mm(V, W), i, out_sys, out_res)
        return
    vals = None
    if all(all(m[i][j] == (m[0][0] if i == j else 0) for i in range(k) for j in range(k)) for m in mats):
        vals = {n: QuadExtElement(1, m[0][0]) for n, m in zip(names, mats)}
    out_res.append(ResidualBlock(level, k, f"multiplicity {k} not separated by the computed operators", vals))


def check_commuting(mats: list[np.ndarray]) -> None:
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            A, B = np.asarray(mats[a], dtype=object), np.asarray(mats[b], dtype=object)
            if not np.array_equal(A.dot(B), B.dot(A)):
                raise ValueError("Brandt matrices do not commute")


def verify_system(sys: EigenSystem, ops: dict) -> bool:
    """Exact check B v = a v for every operator (v over Q(w_D))."""
    v = sys.eigenvector
    if all(x.is_zero() for x in v):
        return False
    for name, B in ops.items():
        a = sys.eigenvalues[name]
        B = np.asarray(B).tolist()
        for i, row in enumerate(B):
            acc = QuadExtElement(sys.field_disc, 0)
            for bij, vj in zip(row, v):
                if bij:
                    acc = acc + vj * bij
            if acc != a * v[i]:
                return False
    return True


def split_systems(level: str, ops: dict) -> tuple[list[EigenSystem], list[ResidualBlock]]:
    """Decompose commuting integer matrices {name: B} into joint eigensystems.

    Operators are used in the dict's order; the first is the primary one.
    Quadratic systems are returned once per Galois pair, choosing the
    conjugate with the larger real eigenvalue of the primary operator.
    """
    names = list(ops)
    mats_np = [np.asarray(ops[n], dtype=np.int64) for n in names]
    check_commuting(mats_np)
    h = len(mats_np[0])
    mats = [_to_frac(M) for M in mats_np]
    I = [[Fraction(int(i == j)) for j in range(h)] for i in range(h)]
    systems: list[EigenSystem] = []
    residual: list[ResidualBlock] = []
    _decompose(level, names, mats, I, 0, systems, residual)
    ones = [Fraction(1)] * h
    for s in systems:
        if s.field_disc == 1:
            v = [x.a for x in s.eigenvector]
            nz = next(x for x in v if x != 0)
            s.is_eisenstein = [x / nz for x in v] == ones
        else:
            prim = s.eigenvalues[names[0]]
            if prim.embeddings()[0] < prim.embeddings()[1]:
                s.eigenvalues = {k: v.conj() for k, v in s.eigenvalues.items()}
                s.eigenvector = [x.conj() for x in s.eigenvector]
        assert verify_system(s, ops), "eigen system failed exact verification"
    eis = [s for s in systems if s.is_eisenstein]
    assert len(eis) == 1, "expected exactly one Eisenstein system"
    cusp = [s for s in systems if not s.is_eisenstein]
    cusp.sort(key=lambda s: (s.degree, [-float(s.eigenvalues[n]) for n in names]))
    dim = 1 + sum(s.degree for s in cusp) + sum(r.dimension for r in residual)
    assert dim == h, (dim, h)
    return eis + cusp, residual
