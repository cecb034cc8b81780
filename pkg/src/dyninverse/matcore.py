"""Dense matrices, the multiplication kernel, I+C transforms and base inversions.

A dense matrix is a numpy array over a ring from :mod:`dyninverse.field`.
``TransformRep`` stores a matrix that equals the identity outside a set of
modified columns ``J``; ``RowBlock`` stores selected rows of such a matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionMismatch, PreconditionViolated
from .field import DEFAULT_PRIME, PolyRing, PrimeField

Ring = PrimeField | PolyRing

_DEFAULT_RING: PrimeField | None = None


def default_ring() -> PrimeField:
    global _DEFAULT_RING
    if _DEFAULT_RING is None:
        _DEFAULT_RING = PrimeField(DEFAULT_PRIME)
    return _DEFAULT_RING


def as_index(idx: Iterable[int] | np.ndarray | int, n: int | None = None) -> np.ndarray:
    """Copy an index sequence (repetition allowed) into an int64 array."""
    if isinstance(idx, (int, np.integer)):
        arr = np.array([int(idx)], dtype=np.int64)
    else:
        arr = np.array(list(idx) if not isinstance(idx, np.ndarray) else idx, dtype=np.int64).reshape(-1)
    if n is not None and arr.size and (arr.min() < 0 or arr.max() >= n):
        raise IndexError(f"index out of range for dimension {n}")
    return arr


IndexSeq = np.ndarray


def submatrix(a: np.ndarray, rows, cols) -> np.ndarray:
    """``a[rows, cols]`` as a copy; index sequences may repeat."""
    return a[np.ix_(as_index(rows), as_index(cols))].copy()


def _sorted_unique(idx) -> np.ndarray:
    return np.unique(as_index(idx))


def _lookup(sorted_keys: np.ndarray, query: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Membership mask and positions of ``query`` inside sorted ``sorted_keys``."""
    if sorted_keys.size == 0:
        return np.zeros(query.shape, dtype=bool), np.zeros(query.shape, dtype=np.int64)
    pos = np.searchsorted(sorted_keys, query)
    pos_c = np.minimum(pos, sorted_keys.size - 1)
    hit = sorted_keys[pos_c] == query
    return hit, pos_c


# ---------------------------------------------------------------------------
# multiplication kernel


@dataclass(frozen=True)
class MulKernel:
    variant: str = "classical-blocked"
    strassen_cutoff: int = 128

    def __post_init__(self):
        if self.variant not in ("classical-blocked", "strassen"):
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.strassen_cutoff < 1:
            raise ValueError("strassen_cutoff must be positive")


CLASSICAL = MulKernel()


def mat_mul(a: np.ndarray, b: np.ndarray, kernel: MulKernel | None = None, ring: Ring | None = None) -> np.ndarray:
    ring = ring or default_ring()
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"inner dimensions differ: {a.shape[:2]} x {b.shape[:2]}")
    if kernel is None or kernel.variant == "classical-blocked":
        return ring.matmul(a, b)
    r, k = a.shape[:2]
    c = b.shape[1]
    s = min(r, k, c)
    if s < kernel.strassen_cutoff:
        return ring.matmul(a, b)
    # Tile the rectangular product into s x s squares (zero padded at edges).
    R, K, C = -(-r // s) * s, -(-k // s) * s, -(-c // s) * s
    ap = _pad(a, R, K, ring)
    bp = _pad(b, K, C, ring)
    out = ring.zeros(R, C)
    for i in range(0, R, s):
        for j in range(0, C, s):
            acc = ring.zeros(s, s)
            for t in range(0, K, s):
                acc = ring.add(acc, _strassen(ap[i:i + s, t:t + s], bp[t:t + s, j:j + s], kernel.strassen_cutoff, ring))
            out[i:i + s, j:j + s] = acc
    return out[:r, :c].copy()


def _pad(a: np.ndarray, r: int, c: int, ring: Ring) -> np.ndarray:
    if a.shape[:2] == (r, c):
        return a
    out = ring.zeros(r, c)
    out[:a.shape[0], :a.shape[1]] = a
    return out


def _strassen(x: np.ndarray, y: np.ndarray, cutoff: int, ring: Ring) -> np.ndarray:
    n = x.shape[0]
    if n < cutoff or n < 2:
        return ring.matmul(x, y)
    if n % 2:
        res = _strassen(_pad(x, n + 1, n + 1, ring), _pad(y, n + 1, n + 1, ring), cutoff, ring)
        return res[:n, :n].copy()
    h = n // 2
    a11, a12, a21, a22 = x[:h, :h], x[:h, h:], x[h:, :h], x[h:, h:]
    b11, b12, b21, b22 = y[:h, :h], y[:h, h:], y[h:, :h], y[h:, h:]
    add, sub = ring.add, ring.sub

    def rec(u, v):
        return _strassen(u, v, cutoff, ring)

    m1 = rec(add(a11, a22), add(b11, b22))
    m2 = rec(add(a21, a22), b11)
    m3 = rec(a11, sub(b12, b22))
    m4 = rec(a22, sub(b21, b11))
    m5 = rec(add(a11, a12), b22)
    m6 = rec(sub(a21, a11), add(b11, b12))
    m7 = rec(sub(a12, a22), add(b21, b22))
    out = np.empty_like(m1, shape=(n, n) + m1.shape[2:])
    out[:h, :h] = add(sub(add(m1, m4), m5), m7)
    out[:h, h:] = add(m3, m5)
    out[h:, :h] = add(m2, m4)
    out[h:, h:] = add(add(sub(m1, m2), m3), m6)
    return out


# ---------------------------------------------------------------------------
# structured matrices


@dataclass
class TransformRep:
    """I + C, stored as the full columns ``cols`` (n x |J|) at indices ``J``."""

    n: int
    J: np.ndarray
    cols: np.ndarray

    def __post_init__(self):
        self.J = as_index(self.J)
        if self.cols.shape[:2] != (self.n, self.J.size):
            raise DimensionMismatch("cols block must be n x |J|")
        if self.J.size > self.n:
            raise DimensionMismatch("|J| exceeds n")
        if self.J.size > 1 and np.any(np.diff(self.J) <= 0):
            order = np.argsort(self.J)
            self.J = self.J[order]
            self.cols = self.cols[:, order]
            if np.any(np.diff(self.J) == 0):
                raise ValueError("duplicate modified column")

    @classmethod
    def identity(cls, n: int, ring: Ring | None = None) -> "TransformRep":
        ring = ring or default_ring()
        return cls(n, np.zeros(0, dtype=np.int64), ring.zeros(n, 0))

    @classmethod
    def from_dense(cls, a: np.ndarray) -> "TransformRep":
        n = a.shape[0]
        return cls(n, np.arange(n, dtype=np.int64), a.copy())

    @classmethod
    def from_columns(cls, n: int, J, cols: np.ndarray) -> "TransformRep":
        return cls(n, as_index(J), cols.copy())

    def copy(self) -> "TransformRep":
        return TransformRep(self.n, self.J.copy(), self.cols.copy())

    def densify(self, ring: Ring | None = None) -> np.ndarray:
        ring = ring or default_ring()
        out = ring.eye(self.n)
        out[:, self.J] = self.cols
        return out

    def take_rows(self, rows) -> np.ndarray:
        return self.cols[as_index(rows)].copy()

    def dense_cols(self, cols, ring: Ring | None = None) -> np.ndarray:
        ring = ring or default_ring()
        cols = as_index(cols)
        out = ring.zeros(self.n, cols.size)
        hit, pos = _lookup(self.J, cols)
        out[:, hit] = self.cols[:, pos[hit]]
        miss = np.flatnonzero(~hit)
        one = ring.one()
        for k in miss:
            out[cols[k], k] = one
        return out

    def apply(self, x: np.ndarray, ring: Ring | None = None, kernel: MulKernel | None = None) -> np.ndarray:
        """Dense product ``self @ x``."""
        ring = ring or default_ring()
        if x.shape[0] != self.n:
            raise DimensionMismatch("row count mismatch")
        out = x.copy()
        if self.J.size == 0:
            return out
        out[self.J] = 0
        return ring.add(out, mat_mul(self.cols, x[self.J], kernel, ring))

    def add_columns(self, delta: "ColSparse", ring: Ring | None = None) -> "TransformRep":
        """self + delta, where delta is a column-sparse difference."""
        ring = ring or default_ring()
        J = np.union1d(self.J, delta.J)
        base = self.dense_cols(J, ring)
        hit, pos = _lookup(J, delta.J)
        base[:, pos] = ring.add(base[:, pos], delta.vals)
        return TransformRep(self.n, J, base)


@dataclass
class ColSparse:
    """An n x n matrix that is zero outside the columns ``J``."""

    n: int
    J: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        self.J = as_index(self.J)
        if self.vals.shape[:2] != (self.n, self.J.size):
            raise DimensionMismatch("vals block must be n x |J|")
        if self.J.size > 1 and np.any(np.diff(self.J) <= 0):
            order = np.argsort(self.J, kind="stable")
            self.J = self.J[order]
            self.vals = self.vals[:, order]
            if np.any(np.diff(self.J) == 0):
                raise ValueError("duplicate column in column-sparse matrix")

    @classmethod
    def zero(cls, n: int, ring: Ring | None = None) -> "ColSparse":
        ring = ring or default_ring()
        return cls(n, np.zeros(0, dtype=np.int64), ring.zeros(n, 0))

    @classmethod
    def from_dense(cls, a: np.ndarray, ring: Ring | None = None) -> "ColSparse":
        nz = np.flatnonzero(np.any(a.reshape(a.shape[0], a.shape[1], -1) != 0, axis=(0, 2)))
        return cls(a.shape[0], nz, a[:, nz].copy())

    def densify(self, ring: Ring | None = None) -> np.ndarray:
        ring = ring or default_ring()
        out = ring.zeros(self.n, self.n)
        out[:, self.J] = self.vals
        return out

    def plus(self, other: "ColSparse", ring: Ring | None = None) -> "ColSparse":
        ring = ring or default_ring()
        J = np.union1d(self.J, other.J)
        vals = ring.zeros(self.n, J.size)
        _, pa = _lookup(J, self.J)
        _, pb = _lookup(J, other.J)
        vals[:, pa] = self.vals
        vals[:, pb] = ring.add(vals[:, pb], other.vals)
        return ColSparse(self.n, J, vals)

    def transpose(self) -> "RowSparse":
        return RowSparse(self.n, self.J.copy(), _swap(self.vals))


@dataclass
class RowSparse:
    """An n x n matrix that is zero outside the rows ``I``."""

    n: int
    I: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        self.I = as_index(self.I)
        if self.vals.shape[:2] != (self.I.size, self.n):
            raise DimensionMismatch("vals block must be |I| x n")

    @classmethod
    def zero(cls, n: int, ring: Ring | None = None) -> "RowSparse":
        ring = ring or default_ring()
        return cls(n, np.zeros(0, dtype=np.int64), ring.zeros(0, n))

    def densify(self, ring: Ring | None = None) -> np.ndarray:
        ring = ring or default_ring()
        out = ring.zeros(self.n, self.n)
        out[self.I] = self.vals
        return out

    def transpose(self) -> ColSparse:
        return ColSparse(self.n, self.I.copy(), _swap(self.vals))


def _swap(a: np.ndarray) -> np.ndarray:
    """Matrix transpose that keeps a trailing coefficient axis in place."""
    return np.swapaxes(a, 0, 1).copy()


@dataclass
class RowBlock:
    """Rows ``I`` of an I+C style matrix.

    Entry (r, c) is ``data[r, pos(c)]`` when ``c`` is in ``J`` and the
    identity entry ``[I[r] == c]`` otherwise.
    """

    n: int
    I: np.ndarray
    J: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        self.I = as_index(self.I)
        self.J = as_index(self.J)
        if self.data.shape[:2] != (self.I.size, self.J.size):
            raise DimensionMismatch("data block must be |I| x |J|")

    def densify(self, ring: Ring | None = None) -> np.ndarray:
        ring = ring or default_ring()
        out = ring.zeros(self.I.size, self.n)
        one = ring.one()
        out[np.arange(self.I.size), self.I] = one
        out[:, self.J] = self.data
        return out

    def dense_cols(self, cols, ring: Ring | None = None) -> np.ndarray:
        ring = ring or default_ring()
        cols = as_index(cols)
        out = ring.zeros(self.I.size, cols.size)
        hit, pos = _lookup(self.J, cols)
        out[:, hit] = self.data[:, pos[hit]]
        miss = np.flatnonzero(~hit)
        if miss.size:
            eq = self.I[:, None] == cols[None, miss]
            rr, cc = np.nonzero(eq)
            out[rr, miss[cc]] = ring.one()
        return out

    def matmul(self, x: np.ndarray, ring: Ring | None = None, kernel: MulKernel | None = None) -> np.ndarray:
        """Rows I of (matrix @ x) for a dense n-row ``x``."""
        ring = ring or default_ring()
        if x.shape[0] != self.n:
            raise DimensionMismatch("row count mismatch")
        out = x[self.I].copy()
        inJ, _ = _lookup(self.J, self.I)
        out[inJ] = 0
        if self.J.size:
            out = ring.add(out, mat_mul(self.data, x[self.J], kernel, ring))
        return out

    def times_transform(self, t: TransformRep, ring: Ring | None = None, kernel: MulKernel | None = None) -> "RowBlock":
        ring = ring or default_ring()
        J = np.union1d(self.J, t.J)
        data = self.dense_cols(J, ring)
        if t.J.size:
            _, pos = _lookup(J, t.J)
            data[:, pos] = self.matmul(t.cols, ring, kernel)
        return RowBlock(self.n, self.I, J, data)


def tmul(a: TransformRep, b: TransformRep, ring: Ring | None = None, kernel: MulKernel | None = None) -> TransformRep:
    """Product of two I+C matrices; the result is modified only on J_a and J_b."""
    ring = ring or default_ring()
    if a.n != b.n:
        raise DimensionMismatch("transforms of different size")
    J = np.union1d(a.J, b.J)
    cols = ring.zeros(a.n, J.size)
    only_a = np.setdiff1d(a.J, b.J)
    if only_a.size:
        _, pa = _lookup(a.J, only_a)
        _, pj = _lookup(J, only_a)
        cols[:, pj] = a.cols[:, pa]
    if b.J.size:
        _, pj = _lookup(J, b.J)
        cols[:, pj] = a.apply(b.cols, ring, kernel)
    return TransformRep(a.n, J, cols)


def invert_transform(t: TransformRep, ring: Ring | None = None, kernel: MulKernel | None = None) -> TransformRep:
    """Inverse of I+C from the inverse of its pivot block T[J, J]."""
    ring = ring or default_ring()
    J = t.J
    if J.size == 0:
        return t.copy()
    c1 = t.cols[J]
    inv1 = ring.inv(c1)
    out = ring.neg(mat_mul(t.cols, inv1, kernel, ring))
    out[J] = inv1
    return TransformRep(t.n, J.copy(), out)


def partial_invert(t, rows, ring: Ring | None = None, kernel: MulKernel | None = None) -> RowBlock:
    """Rows ``rows`` of the inverse of an I+C matrix, reading only those rows.

    ``t`` needs ``n``, ``J`` and ``take_rows``; every modified column index
    must occur in ``rows``.
    """
    ring = ring or default_ring()
    I = as_index(rows, t.n)
    J = as_index(t.J)
    first = {}
    for k, r in enumerate(I.tolist()):
        first.setdefault(r, k)
    missing = [j for j in J.tolist() if j not in first]
    if missing:
        raise PreconditionViolated(f"modified columns {missing[:5]} not among requested rows")
    block = t.take_rows(I)
    if J.size == 0:
        return RowBlock(t.n, I, J, block)
    posJ = np.array([first[j] for j in J.tolist()], dtype=np.int64)
    inv1 = ring.inv(block[posJ])
    data = ring.neg(mat_mul(block, inv1, kernel, ring))
    hit, pos = _lookup(J, I)
    data[hit] = inv1[pos[hit]]
    return RowBlock(t.n, I, J, data)


def gaussian_inverse(a: np.ndarray, ring: Ring | None = None):
    """(inverse, determinant) by elimination; raises Singular."""
    ring = ring or default_ring()
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("square matrix required")
    return ring.gaussian_inverse(a)


def gaussian_rank(a: np.ndarray, ring: PrimeField | None = None) -> int:
    ring = ring or default_ring()
    return ring.rank(a)


def densify(x, ring: Ring | None = None) -> np.ndarray:
    if isinstance(x, np.ndarray):
        return x
    return x.densify(ring)
