"""Lagrangian planes in (O_F/P^e)^4 in Plucker coordinates, the symplectic
action on them, and the decomposition into Gamma-orbits."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .base_ring import PrimeIdeal, ResidueRing, prime_ideal
from .local_splitting import SimilitudeMatrix, embed_batch, residue_ring, split_order
from .quaternion_order import gamma_generators, gamma_group, unit_group
from .residue_linalg import PLUCKER_PAIRS, matvec, sparse_matvec, wedge2

GAMMA_ORDER = 14400  # |Gamma / {+-1}|

# Plucker coordinates in the order (12, 13, 14, 23, 24, 34).  For the form
# J = [[0, I], [-I, 0]] the pairing of the two spanning vectors is p13 + p24.
ISOTROPY_FORM = (0, 1, 0, 0, 1, 0)


def flag_count(q: int, e: int) -> int:
    return q ** (3 * (e - 1)) * (q + 1) * (q * q + 1)


def wedge_points(R: ResidueRing, U: np.ndarray) -> np.ndarray:
    """Plucker vectors of the spans of pairs of column vectors U[..., :, 0:2]."""
    out = np.zeros(U.shape[:-2] + (6,), dtype=np.int64)
    for k, (i, j) in enumerate(PLUCKER_PAIRS):
        out[..., k] = R.sub[R.mul[U[..., i, 0], U[..., j, 1]], R.mul[U[..., j, 0], U[..., i, 1]]]
    return out


def plucker_relations(R: ResidueRing, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Plucker relation, isotropy form) values, both zero on Lagrangians."""
    pl = R.add[R.sub[R.mul[p[..., 0], p[..., 5]], R.mul[p[..., 1], p[..., 4]]], R.mul[p[..., 2], p[..., 3]]]
    iso = R.add[p[..., 1], p[..., 4]]
    return pl, iso


def canonicalize(R: ResidueRing, p: np.ndarray) -> np.ndarray:
    """Scale each Plucker vector so its first unit coordinate is 1."""
    p = np.asarray(p, dtype=np.int64)
    unit = R.is_unit[p]
    if not np.all(unit.any(axis=-1)):
        raise ValueError("Plucker vector has no unit coordinate")
    first = unit.argmax(axis=-1)
    lead = np.take_along_axis(p, first[..., None], axis=-1)
    return R.mul[R.inv[lead], p]


def canonical_plucker(R: ResidueRing, raw) -> tuple[int, ...]:
    """Canonical form of one Plucker vector (checked against both relations)."""
    p = np.asarray(raw, dtype=np.int64)
    pl, iso = plucker_relations(R, p)
    if pl != 0 or iso != 0:
        raise ValueError("not the Plucker vector of a Lagrangian plane")
    return tuple(int(x) for x in canonicalize(R, p))


def _encode(R: ResidueRing, p: np.ndarray) -> np.ndarray:
    if R.size ** 6 >= 2 ** 62:
        raise ValueError(f"residue ring {R} too large for 64-bit point keys")
    key = np.zeros(p.shape[:-1], dtype=np.int64)
    for k in range(6):
        key = key * R.size + p[..., k]
    return key


def _decode(R: ResidueRing, key: np.ndarray) -> np.ndarray:
    out = np.zeros(key.shape + (6,), dtype=np.int64)
    key = key.copy()
    for k in range(5, -1, -1):
        out[..., k] = key % R.size
        key //= R.size
    return out


def sp4_generators(R: ResidueRing) -> list[np.ndarray]:
    """Root elements x_a(t), t in {1, w}, of Sp_4 for J = [[0, I], [-I, 0]], plus J."""
    one = R.one
    gens = []
    I4 = np.eye(4, dtype=np.int64) * one
    for t in (R.one, _omega(R)):
        for S in ([[t, 0], [0, 0]], [[0, 0], [0, t]], [[0, t], [t, 0]]):
            S = np.array(S, dtype=np.int64)
            up = I4.copy()
            up[:2, 2:] = S
            lo = I4.copy()
            lo[2:, :2] = S
            gens += [up, lo]
        # [[A, 0], [0, A^-T]] with A = 1 + t E12
        g = I4.copy()
        g[0, 1] = t
        g[3, 2] = R.neg[t]
        gens.append(g)
    J = np.zeros((4, 4), dtype=np.int64)
    J[0, 2] = J[1, 3] = one
    J[2, 0] = J[3, 1] = R.neg[one]
    gens.append(J)
    return gens


def _omega(R: ResidueRing) -> int:
    from .base_ring import OMEGA

    return R.reduce(OMEGA)


def apply_wedge(R: ResidueRing, W: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Apply 6x6 wedge matrices to Plucker vectors and canonicalize."""
    return canonicalize(R, matvec(R, W, pts))


@dataclass(eq=False)
class FlagSpace:
    """All Lagrangian planes mod P^e, sorted lexicographically by canonical point."""

    prime: PrimeIdeal
    e: int
    points: np.ndarray  # (n, 6)
    keys: np.ndarray  # sorted int64 encodings

    @property
    def ring(self) -> ResidueRing:
        return residue_ring(self.prime, self.e)

    def __len__(self):
        return len(self.points)

    def index_of(self, pts: np.ndarray) -> np.ndarray:
        k = _encode(self.ring, np.asarray(pts, dtype=np.int64))
        idx = np.searchsorted(self.keys, k)
        idx = np.minimum(idx, len(self.keys) - 1)
        if not np.all(self.keys[idx] == k):
            raise KeyError("point not in the flag space")
        return idx

    def index(self, point) -> int:
        return int(self.index_of(np.asarray(point)[None, :])[0])

    def permutation(self, W: np.ndarray, chunk: int = 1 << 16) -> np.ndarray:
        """Index permutation induced by the 6x6 wedge matrix W."""
        out = np.empty(len(self), dtype=np.int64)
        for s in range(0, len(self), chunk):
            out[s:s + chunk] = self.index_of(apply_wedge(self.ring, W, self.points[s:s + chunk]))
        return out

    def act(self, g: SimilitudeMatrix, point) -> tuple[int, ...]:
        R = self.ring
        if not R.is_unit[g.similitude]:
            raise ValueError("similitude factor is not a unit")
        return tuple(int(x) for x in apply_wedge(R, wedge2(R, g.matrix), np.asarray(point, dtype=np.int64)))


_flag_lock = threading.Lock()
_flag_cache: dict[tuple[str, int], FlagSpace] = {}


def enumerate_flags(prime, e: int = 1) -> FlagSpace:
    """BFS closure of span(e1, e2) under generators of Sp_4(O_F/P^e)."""
    if not isinstance(prime, PrimeIdeal):
        prime = prime_ideal(prime)
    key = (prime.key, e)
    with _flag_lock:
        if key in _flag_cache:
            return _flag_cache[key]
    R = residue_ring(prime, e)
    Ws = np.array([wedge2(R, g) for g in sp4_generators(R)])
    start = np.zeros((1, 6), dtype=np.int64)
    start[0, 0] = R.one
    seen = _encode(R, start)
    frontier = start
    while len(frontier):
        imgs = canonicalize(R, np.concatenate([sparse_matvec(R, W, frontier) for W in Ws]))
        k = np.unique(_encode(R, imgs))
        new = k[~np.isin(k, seen, assume_unique=True)]
        seen = np.union1d(seen, new)
        frontier = _decode(R, new)
    pts = _decode(R, seen)
    fs = FlagSpace(prime, e, pts, seen)
    expected = flag_count(prime.norm, e)
    assert len(fs) == expected, (len(fs), expected)
    with _flag_lock:
        return _flag_cache.setdefault(key, fs)


def enumerate_flags_direct(prime, e: int = 1) -> np.ndarray:
    """Oracle: canonical Plucker points of all row-reduced isotropic 2x4 bases.

    A free rank-2 summand has a first column pair (i, j) whose 2x2 minor is a
    unit; reducing that block to the identity gives a unique basis.
    """
    if not isinstance(prime, PrimeIdeal):
        prime = prime_ideal(prime)
    R = residue_ring(prime, e)
    n = R.size
    grid = np.stack(np.meshgrid(*([np.arange(n)] * 4), indexing="ij"), axis=-1).reshape(-1, 4)
    found = []
    for k, (i, j) in enumerate(PLUCKER_PAIRS):
        free = [c for c in range(4) if c not in (i, j)]
        U = np.zeros((len(grid), 4, 2), dtype=np.int64)
        U[:, i, 0] = R.one
        U[:, j, 1] = R.one
        U[:, free[0], 0], U[:, free[1], 0] = grid[:, 0], grid[:, 1]
        U[:, free[0], 1], U[:, free[1], 1] = grid[:, 2], grid[:, 3]
        p = wedge_points(R, U)
        ok = ~R.is_unit[p[:, :k]].any(axis=1) if k else np.ones(len(p), dtype=bool)
        _, iso = plucker_relations(R, p)
        ok &= iso == 0
        found.append(canonicalize(R, p[ok]))
    pts = np.concatenate(found)
    keys = _encode(R, pts)
    assert len(np.unique(keys)) == len(keys)
    return pts[np.argsort(keys)]


# --- Gamma orbits ----------------------------------------------------------

Level = tuple[tuple[PrimeIdeal, int], ...]


def normalize_level(level) -> Level:
    """Accept a prime, (prime, e), or a list of those; sort factors canonically."""
    if isinstance(level, (PrimeIdeal, str)):
        level = [(level, 1)]
    elif isinstance(level, tuple) and len(level) == 2 and isinstance(level[1], int) \
            and not isinstance(level[0], tuple):
        level = [level]
    out = []
    for P, e in level:
        if not isinstance(P, PrimeIdeal):
            P = prime_ideal(P)
        out.append((P, int(e)))
    out.sort(key=lambda t: (t[0].norm, t[0].generator.a, t[0].generator.b))
    if len({P.key for P, _ in out}) != len(out):
        raise ValueError("repeated prime in level")
    return tuple(out)


def level_label(level: Level) -> str:
    return "*".join(P.key if e == 1 else f"{P.key}^{e}" for P, e in level)


@dataclass(eq=False)
class OrbitData:
    level: Level
    spaces: tuple[FlagSpace, ...]
    orbit_id: np.ndarray  # per flat product index
    representatives: np.ndarray  # flat indices, sorted
    orbit_sizes: np.ndarray
    stabilizer_orders: np.ndarray = field(init=False)

    def __post_init__(self):
        assert np.all(GAMMA_ORDER % self.orbit_sizes == 0)
        self.stabilizer_orders = GAMMA_ORDER // self.orbit_sizes

    @property
    def h(self) -> int:
        return len(self.representatives)

    @cached_property
    def radix(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.spaces)

    def unflatten(self, flat: np.ndarray) -> np.ndarray:
        return np.stack(np.unravel_index(np.asarray(flat), self.radix), axis=-1)

    def flatten(self, idx: np.ndarray) -> np.ndarray:
        return np.ravel_multi_index(tuple(np.moveaxis(np.asarray(idx), -1, 0)), self.radix)

    def representative_points(self) -> list[tuple[tuple[int, ...], ...]]:
        out = []
        for row in self.unflatten(self.representatives):
            out.append(tuple(tuple(int(x) for x in s.points[i]) for s, i in zip(self.spaces, row)))
        return out


def gamma_wedges(space: FlagSpace, mats: np.ndarray) -> np.ndarray:
    """6x6 wedge images of 2x2 O_B-matrices acting on one factor."""
    S = split_order(space.prime, space.e)
    return wedge2(space.ring, embed_batch(mats, S))


def gamma_orbits(level) -> OrbitData:
    """Gamma-orbits on the product of flag spaces of the prime-power factors."""
    level = normalize_level(level)
    spaces = tuple(enumerate_flags(P, e) for P, e in level)
    gens = np.array(gamma_generators())
    radix = tuple(len(s) for s in spaces)
    total = int(np.prod(radix))
    perms = [[s.permutation(W) for W in gamma_wedges(s, gens)] for s in spaces]
    flat = np.arange(total)
    idx = np.unravel_index(flat, radix)
    rows, cols = [], []
    for g in range(len(gens)):
        img = tuple(perms[f][g][idx[f]] for f in range(len(spaces)))
        rows.append(flat)
        cols.append(np.ravel_multi_index(img, radix))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(total, total))
    _, labels = connected_components(graph, directed=True, connection="weak")
    # relabel orbits by their least member (= lexicographically least point)
    first = np.full(labels.max() + 1, total, dtype=np.int64)
    np.minimum.at(first, labels, flat)
    order = np.argsort(first)
    reps = first[order]
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    orbit_id = relabel[labels]
    sizes = np.bincount(orbit_id)
    return OrbitData(level, spaces, orbit_id, reps, sizes)


def stabilizer_by_scan(orbits: OrbitData, rep_index: int) -> int:
    """Count the elements of Gamma / {+-1} fixing a representative (slow check)."""
    U = unit_group()
    mats = np.array([g.matrix(U) for g in gamma_group()])
    flat = int(orbits.representatives[rep_index])
    pos = orbits.unflatten(np.array([flat]))[0]
    fixed = np.ones(len(mats), dtype=bool)
    for s, i in zip(orbits.spaces, pos):
        Ws = gamma_wedges(s, mats)
        imgs = apply_wedge(s.ring, Ws, np.broadcast_to(s.points[i], (len(mats), 6)))
        fixed &= np.all(imgs == s.points[i], axis=1)
    return int(fixed.sum())
