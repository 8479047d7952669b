"""Vectorised matrix arithmetic over O_F/P^e (elements as table indices)
and the canonical Howell form of submodules of (O_F/P^e)^n."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .base_ring import ResidueRing

PLUCKER_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def matmul(R: ResidueRing, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """A @ B over R, broadcasting over leading axes."""
    prod = R.mul[A[..., :, :, None], B[..., None, :, :]]  # (..., i, k, j)
    acc = prod[..., :, 0, :]
    for k in range(1, prod.shape[-2]):
        acc = R.add[acc, prod[..., :, k, :]]
    return acc


def matvec(R: ResidueRing, A: np.ndarray, x: np.ndarray) -> np.ndarray:
    return matmul(R, A, x[..., :, None])[..., 0]


def sparse_matvec(R: ResidueRing, A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """A @ x for a single matrix A and a batch of vectors x, skipping zero entries."""
    out = np.empty(x.shape[:-1] + (A.shape[0],), dtype=np.int64)
    for i, row in enumerate(A):
        acc = None
        for k in np.flatnonzero(row):
            term = x[..., k] if row[k] == R.one else R.mul[row[k], x[..., k]]
            acc = term if acc is None else R.add[acc, term]
        out[..., i] = 0 if acc is None else acc
    return out


def transpose(A: np.ndarray) -> np.ndarray:
    return np.swapaxes(A, -1, -2)


def identity(R: ResidueRing, n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=np.int64)
    np.fill_diagonal(out, R.one)
    return out


def scalar_matrix(R: ResidueRing, s: int, n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=np.int64)
    np.fill_diagonal(out, s)
    return out


def det2(R: ResidueRing, A: np.ndarray) -> np.ndarray:
    return R.sub[R.mul[A[..., 0, 0], A[..., 1, 1]], R.mul[A[..., 0, 1], A[..., 1, 0]]]


def wedge2(R: ResidueRing, g: np.ndarray) -> np.ndarray:
    """Second exterior power of 4x4 matrices in the Plucker basis."""
    out = np.zeros(g.shape[:-2] + (6, 6), dtype=np.int64)
    for r, (i, j) in enumerate(PLUCKER_PAIRS):
        for c, (k, l) in enumerate(PLUCKER_PAIRS):
            out[..., r, c] = R.sub[
                R.mul[g[..., i, k], g[..., j, l]], R.mul[g[..., i, l], g[..., j, k]]
            ]
    return out


def symplectic_form(R: ResidueRing) -> np.ndarray:
    """J = [[0, 1], [-1, 0]] in 2x2 blocks."""
    J = np.zeros((4, 4), dtype=np.int64)
    J[0, 2] = J[1, 3] = R.one
    J[2, 0] = J[3, 1] = R.neg[R.one]
    return J


class _Tables:
    """Python-list copies of the ring tables (scalar access is hot)."""

    def __init__(self, R: ResidueRing):
        self.e = R.e
        self.mul = R.mul.tolist()
        self.sub = R.sub.tolist()
        self.inv = R.inv.tolist()
        self.val = R.valuation.tolist()
        self.unit_part = R.unit_part.tolist()
        self.div_pi = R.div_pi_power.tolist()
        self.red = R.reduce_mod_pi_power.tolist()
        self.pi_pow = list(R.pi_powers)


@lru_cache(maxsize=None)
def _tables(R: ResidueRing) -> _Tables:
    return _Tables(R)


def howell_form(R: ResidueRing, rows) -> tuple[tuple[int, ...], ...]:
    """Canonical Howell form of the row span of ``rows`` over the chain ring R.

    Pivots are normalised to pi^v and entries above a pivot of valuation v
    are reduced to canonical representatives mod P^v, so two generating
    sets span the same submodule iff their forms are equal.
    """
    T = _tables(R)
    mul, sub, val = T.mul, T.sub, T.val
    rows = [list(map(int, r)) for r in rows]
    rows = [r for r in rows if any(r)]
    if not rows:
        return ()
    n = len(rows[0])
    piv_rows: list[tuple[int, int, list[int]]] = []
    for col in range(n):
        best = None
        for idx, r in enumerate(rows):
            x = r[col]
            if x and (best is None or val[x] < val[rows[best][col]]):
                best = idx
                if val[x] == 0:
                    break
        if best is None:
            continue
        piv = rows[best]
        v = val[piv[col]]
        ui = T.inv[T.unit_part[piv[col]]]
        mrow = mul[ui]
        piv = [mrow[x] for x in piv]
        new_rows = []
        dv = T.div_pi[v]
        for idx, r in enumerate(rows):
            if idx == best:
                continue
            y = r[col]
            if y:
                mt = mul[dv[y]]
                r = [sub[a][mt[b]] for a, b in zip(r, piv)]
            if any(r):
                new_rows.append(r)
        if v > 0:
            mp = mul[T.pi_pow[T.e - v]]
            ann = [mp[x] for x in piv]
            if any(ann):
                new_rows.append(ann)
        rows = new_rows
        piv_rows.append((col, v, piv))
    # reduce entries above each pivot
    out = [p[2] for p in piv_rows]
    for i, (col, v, piv) in enumerate(piv_rows):
        red = T.red[v]
        dv = T.div_pi[v]
        for j in range(i):
            y = out[j][col]
            rep = red[y]
            if y != rep:
                t = dv[sub[y][rep]]
                mt = mul[t]
                out[j] = [sub[a][mt[b]] for a, b in zip(out[j], piv)]
    return tuple(tuple(r) for r in out)


def rank_mod_p(R: ResidueRing, rows) -> int:
    """Rank of the reduction mod P of a matrix over R."""
    F = R if R.e == 1 else ResidueRing(R.prime, 1)
    red = R.to_residue_field() if R.e > 1 else None
    rows = np.asarray(rows, dtype=np.int64)
    if red is not None:
        rows = red[rows]
    return len(howell_form(F, rows.tolist()))


def ranks_mod_p(R: ResidueRing, mats: np.ndarray) -> np.ndarray:
    """Vectorised rank of the reductions mod P of a batch of square matrices."""
    F = R if R.e == 1 else ResidueRing(R.prime, 1)
    M = mats if R.e == 1 else R.to_residue_field()[mats]
    M = M.copy()
    n_batch = M.shape[0]
    nrows, ncols = M.shape[-2:]
    rank = np.zeros(n_batch, dtype=np.int64)
    row_ptr = np.zeros(n_batch, dtype=np.int64)
    ar = np.arange(n_batch)
    for col in range(ncols):
        # pick a row >= row_ptr with nonzero entry in this column
        cand = (M[:, :, col] != 0) & (np.arange(nrows)[None, :] >= row_ptr[:, None])
        has = cand.any(axis=1)
        pr = np.argmax(cand, axis=1)
        idx = ar[has]
        if len(idx) == 0:
            continue
        # swap pivot row into position row_ptr
        rp = row_ptr[idx]
        tmp = M[idx, rp].copy()
        M[idx, rp] = M[idx, pr[idx]]
        M[idx, pr[idx]] = tmp
        piv = M[idx, rp]  # (k, ncols)
        pinv = F.inv[piv[:, col]]
        piv = F.mul[pinv[:, None], piv]
        M[idx, rp] = piv
        for r in range(nrows):
            sel = r != rp
            ii = idx[sel]
            if len(ii) == 0:
                continue
            f = M[ii, r, col]
            M[ii, r] = F.sub[M[ii, r], F.mul[f[:, None], piv[sel]]]
        rank[idx] += 1
        row_ptr[idx] += 1
    return rank
