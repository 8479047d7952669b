"""Coset sets Theta_1, Theta_2 and the Brandt matrices of T_1(P), T_2(P).

A left coset Gamma*u with u conj(u)^t = pi^s is determined by the row
lattice O_B^2 u, which contains pi^s O_B^2.  Its image mod P^s under the
local splitting is a submodule of (O_F/P^s)^4; the Howell form of that
submodule is used as the class key.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .base_ring import PrimeIdeal, RingElement, prime_ideal, totally_positive_generator
from .flags import OrbitData, apply_wedge, flag_count, gamma_orbits, normalize_level
from .lattice import elements_of_norm
from .local_splitting import embed_batch, split_order
from .quaternion_order import (
    build_maximal_order,
    gamma_generators,
    mat_mul,
    similitude,
)
from .residue_linalg import howell_form, ranks_mod_p, wedge2


class UnsupportedOperation(Exception):
    """Requested Hecke operator is outside the supported range."""


def theta_count(q: int, kind: int) -> int:
    """Number of left Gamma-cosets in Theta_kind for a prime of norm q."""
    if kind == 1:
        return q ** 3 + q ** 2 + q + 1
    return q ** 4 + q ** 3 + q ** 2 + q


@dataclass(eq=False)
class ThetaSet:
    prime: PrimeIdeal
    kind: int
    reps: np.ndarray  # (n, 2, 2, 8) integer coordinates, sorted by key
    keys: list  # Howell forms mod P^kind, one per rep

    def __len__(self):
        return len(self.reps)

    @property
    def pi(self) -> RingElement:
        return totally_positive_generator(self.prime.generator)


def _keys(P: PrimeIdeal, s: int, u: np.ndarray) -> list:
    S = split_order(P, s)
    mats = embed_batch(u, S)
    return [howell_form(S.ring, m.tolist()) for m in mats]


def _ranks(P: PrimeIdeal, u: np.ndarray) -> np.ndarray:
    S = split_order(P, 1)
    return ranks_mod_p(S.ring, embed_batch(u, S))


def _complete_row(row: np.ndarray, pi: RingElement) -> np.ndarray | None:
    """Second row (c, d) with (a, b), (c, d) orthogonal and of norm pi."""
    O = build_maximal_order()
    a, b = row[:8], row[8:]
    if not a.any():
        cs = elements_of_norm(pi)
        u = np.zeros((2, 2, 8), dtype=np.int64)
        u[0, 1], u[1, 0] = b, cs[0]
        return u
    na = O.nr(a)
    mu = RingElement(int(na[0]), int(na[1]))
    ds = elements_of_norm(mu)
    ba = O.mul(O.conj(b), a)
    cand = O.mul(ds, ba)  # d * conj(b) * a
    ok = O.is_divisible(cand, mu)
    if not ok.any():
        return None
    k = int(np.argmax(ok))
    c = -O.exact_div(cand[k], mu)
    u = np.zeros((2, 2, 8), dtype=np.int64)
    u[0, 0], u[0, 1], u[1, 0], u[1, 1] = a, b, c, ds[k]
    return u


def _right_closure(P, s, seeds: np.ndarray, known: dict, target: int | None, want_rank: int | None):
    """Extend ``known`` (key -> matrix) by the right Gamma-orbits of ``seeds``."""
    O = build_maximal_order()
    gens = np.array(gamma_generators())
    frontier = []
    if len(seeds):
        keep = np.ones(len(seeds), dtype=bool) if want_rank is None else _ranks(P, seeds) == want_rank
        seeds = seeds[keep]
        for k, u in zip(_keys(P, s, seeds), seeds):
            if k not in known:
                known[k] = u
                frontier.append(u)
    while frontier and (target is None or len(known) < target):
        F = np.array(frontier)
        imgs = mat_mul(O, F[:, None], gens[None]).reshape(-1, 2, 2, 8)
        frontier = []
        for k, u in zip(_keys(P, s, imgs), imgs):
            if k not in known:
                known[k] = u
                frontier.append(u)
    return known


def _theta1(P: PrimeIdeal) -> dict:
    pi = totally_positive_generator(P.generator)
    target = theta_count(P.norm, 1)
    rows = elements_of_norm(pi, pairs=True)
    known: dict = {}
    for row in rows:
        if len(known) >= target:
            break
        u = _complete_row(row, pi)
        if u is None:
            continue
        if _keys(P, 1, u[None])[0] in known:
            continue
        _right_closure(P, 1, u[None], known, target, None)
    return known


def _theta2(P: PrimeIdeal, theta1: "ThetaSet") -> dict:
    O = build_maximal_order()
    target = theta_count(P.norm, 2)
    # every class of Theta_2 is Gamma v w with v a Theta_1 rep and w in the
    # right Gamma-orbit of a Theta_1 seed; right-closing v * seed suffices
    seeds = _theta1_seeds(P, theta1)
    known: dict = {}
    for w in seeds:
        prods = mat_mul(O, theta1.reps[:, None], w[None, None])[:, 0]
        _right_closure(P, 2, prods, known, None, 1)
    assert len(known) == target, (len(known), target)
    return known


def _theta1_seeds(P: PrimeIdeal, theta1: "ThetaSet") -> list[np.ndarray]:
    """One representative per right Gamma-orbit on the Theta_1 classes."""
    keyset = {k: i for i, k in enumerate(theta1.keys)}
    seen = np.zeros(len(theta1), dtype=bool)
    O = build_maximal_order()
    gens = np.array(gamma_generators())
    seeds = []
    for i in range(len(theta1)):
        if seen[i]:
            continue
        seeds.append(theta1.reps[i])
        seen[i] = True
        frontier = [i]
        while frontier:
            F = theta1.reps[frontier]
            imgs = mat_mul(O, F[:, None], gens[None]).reshape(-1, 2, 2, 8)
            frontier = []
            for k in _keys(P, 1, imgs):
                j = keyset[k]
                if not seen[j]:
                    seen[j] = True
                    frontier.append(j)
    return seeds


_theta_lock = threading.Lock()
_theta_cache: dict[tuple[str, int], ThetaSet] = {}


def _as_theta(P: PrimeIdeal, kind: int, known: dict) -> ThetaSet:
    items = sorted(known.items(), key=lambda kv: kv[0])
    return ThetaSet(P, kind, np.array([u for _, u in items]), [k for k, _ in items])


def theta_set(prime, kind: int) -> ThetaSet:
    """Representatives of Gamma \\ {u : u conj(u)^t = pi^kind, rank of u mod P = 3 - kind}."""
    if kind not in (1, 2):
        raise ValueError("kind must be 1 or 2")
    P = prime if isinstance(prime, PrimeIdeal) else prime_ideal(prime)
    key = (P.key, kind)
    with _theta_lock:
        if key in _theta_cache:
            return _theta_cache[key]
    if kind == 1:
        T = _as_theta(P, 1, _theta1(P))
    else:
        T = _as_theta(P, 2, _theta2(P, theta_set(P, 1)))
    with _theta_lock:
        return _theta_cache.setdefault(key, T)


def install_theta(T: ThetaSet) -> ThetaSet:
    with _theta_lock:
        return _theta_cache.setdefault((T.prime.key, T.kind), T)


def theta_from_reps(prime: PrimeIdeal, kind: int, reps: np.ndarray) -> ThetaSet:
    """Rebuild a ThetaSet from stored representatives (keys recomputed)."""
    reps = np.asarray(reps, dtype=np.int64)
    return _as_theta(prime, kind, dict(zip(_keys(prime, kind, reps), reps)))


def verify_theta(T: ThetaSet) -> None:
    """Similitude, rank and distinctness checks on every representative."""
    O = build_maximal_order()
    pi_s = T.pi ** T.kind
    sim = similitude(O, T.reps)
    scal = O.scalar(pi_s)
    assert np.all(sim[:, 0, 0] == scal) and np.all(sim[:, 1, 1] == scal)
    assert not sim[:, 0, 1].any() and not sim[:, 1, 0].any()
    assert np.all(_ranks(T.prime, T.reps) == 3 - T.kind)
    assert len(set(T.keys)) == len(T)


# --- Brandt matrices ---------------------------------------------------------

@dataclass(eq=False)
class BrandtMatrix:
    level: tuple
    prime: PrimeIdeal
    kind: int
    entries: np.ndarray  # (h, h) int64

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)


def brandt_matrix(level, prime, kind: int, orbits: OrbitData | None = None) -> BrandtMatrix:
    """entries[i][j] = #{u in Theta_kind : u x_i in the Gamma-orbit of x_j}."""
    level = normalize_level(level)
    P = prime if isinstance(prime, PrimeIdeal) else prime_ideal(prime)
    if any(Q.key == P.key for Q, _ in level):
        raise UnsupportedOperation(f"Hecke operator at {P.label} divides the level")
    orbits = orbits or gamma_orbits(level)
    T = theta_set(P, kind)
    h = orbits.h
    rep_pos = orbits.unflatten(orbits.representatives)  # (h, factors)
    img_pos = np.zeros((h, len(T), len(orbits.spaces)), dtype=np.int64)
    for f, space in enumerate(orbits.spaces):
        S = split_order(space.prime, space.e)
        R = space.ring
        Ws = wedge2(R, embed_batch(T.reps, S))  # (n, 6, 6)
        for i in range(h):
            x = space.points[rep_pos[i, f]]
            imgs = apply_wedge(R, Ws, np.broadcast_to(x, (len(T), 6)))
            img_pos[i, :, f] = space.index_of(imgs)
    targets = orbits.orbit_id[orbits.flatten(img_pos)]  # (h, n)
    B = np.zeros((h, h), dtype=np.int64)
    for i in range(h):
        B[i] = np.bincount(targets[i], minlength=h)
    return BrandtMatrix(level, P, kind, B)


def hecke_primes() -> list[PrimeIdeal]:
    """The primes (2), (sqrt 5), (3) carrying the tabulated Hecke operators."""
    return [prime_ideal(g) for g in ("2", "2+w", "3")]


def expected_row_sum(P: PrimeIdeal, kind: int) -> int:
    return theta_count(P.norm, kind)


__all__ = [
    "BrandtMatrix",
    "ThetaSet",
    "UnsupportedOperation",
    "brandt_matrix",
    "flag_count",
    "theta_count",
    "theta_set",
    "verify_theta",
]
