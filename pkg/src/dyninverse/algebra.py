"""Determinants, adjoints, linear systems, products and rank on top of dyninv."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .dyninv import ColumnInverse, ElementInverse, SingularSafe
from .errors import DimensionMismatch, Singular
from .matcore import MulKernel, Ring, as_index, default_ring


class DetTracker:
    """Running determinant of a matrix under element or column updates.

    Each update multiplies the determinant by ``det(I + A^{-1}[C, R] D)``
    where ``D`` is the change restricted to its rows ``R`` and columns ``C``.
    Works over the polynomial ring too, where the factor must be a unit.
    """

    def __init__(self, A: np.ndarray, mode: str = "element", ring: Ring | None = None,
                 kernel: MulKernel | None = None, k1: int | None = None, k2: int | None = None,
                 A_inv: np.ndarray | None = None, det=None):
        self.ring = ring or default_ring()
        if mode not in ("element", "column"):
            raise ValueError("mode must be 'element' or 'column'")
        self.mode = mode
        A = np.array(A, dtype=np.int64)
        if A_inv is None or det is None:
            A_inv, det = self.ring.gaussian_inverse(A)
        inv = A_inv
        if mode == "element":
            self.inv = ElementInverse(A, k1, k2, self.ring, kernel, A0_inv=inv)
        else:
            self.inv = ColumnInverse(A, k1, self.ring, kernel)
        self.det = self.ring.lift(det) if np.ndim(det) == 0 else det
        self.n = A.shape[0]

    @property
    def A(self) -> np.ndarray:
        return self.inv.A

    def _factor(self, rows: np.ndarray, cols: np.ndarray, block: np.ndarray):
        """det(I + inverse[cols, rows] @ block) for block = change[rows, cols]."""
        ring = self.ring
        sub = self.inv.query(cols, rows)
        if cols.size == 1 and rows.size == 1:
            return ring.sadd(ring.one(), ring.smul(sub[0, 0], block[0, 0]))
        m = ring.add(ring.eye(cols.size), ring.matmul(sub, block))
        return ring.det(m)

    def _check(self, f) -> None:
        if not self.ring.is_unit(f):
            raise Singular("update makes the matrix singular")

    def update(self, changes: Sequence[tuple[int, int, object]]):
        """Apply ``(i, j, value)`` changes; returns the new determinant."""
        ring = self.ring
        target = {}
        for i, j, v in changes:
            target[(int(i), int(j))] = ring.lift(v)
        rows = np.array(sorted({i for i, _ in target}), dtype=np.int64)
        cols = np.array(sorted({j for _, j in target}), dtype=np.int64)
        if rows.size == 0:
            return self.det
        block = ring.zeros(rows.size, cols.size)
        rpos = {r: k for k, r in enumerate(rows.tolist())}
        cpos = {c: k for k, c in enumerate(cols.tolist())}
        for (i, j), v in target.items():
            block[rpos[i], cpos[j]] = ring.ssub(v, self.A[i, j])
        f = self._factor(rows, cols, block)
        self._check(f)
        if self.mode == "element":
            self.inv.update(list((i, j, v) for (i, j), v in target.items()))
        else:
            newA = self.A[:, cols].copy()
            for (i, j), v in target.items():
                newA[i, cpos[j]] = v
            self.inv.update_columns(cols, newA)
        self.det = ring.smul(self.det, f)
        return self.det

    def update_column(self, j: int, v) -> object:
        ring = self.ring
        v = np.asarray(v, dtype=np.int64).reshape((self.n,) + self.A.shape[2:]) % ring.p
        delta = ring.sub(v, self.A[:, j])
        row = self.inv.query([j], np.arange(self.n))
        f = ring.sadd(ring.one(), ring.matmul(row, delta.reshape((self.n, 1) + delta.shape[1:]))[0, 0])
        self._check(f)
        if self.mode == "element":
            nz = [r for r in range(self.n) if not ring.is_zero(delta[r])]
            self.inv.update([(r, j, v[r]) for r in nz])
        else:
            self.inv.update(j, v)
        self.det = ring.smul(self.det, f)
        return self.det

    def adjoint(self, i: int, j: int):
        """Entry (i, j) of adj(A) = det(A) * A^{-1}."""
        return self.ring.smul(self.det, self.inv.query([i], [j])[0, 0])


def det_update(s: DetTracker, change) -> object:
    if isinstance(change, tuple) and len(change) == 3 and np.ndim(change[0]) == 0:
        return s.update([change])
    return s.update(change)


def adjoint_query(s: DetTracker, i: int, j: int):
    return s.adjoint(i, j)


class LinearSystem:
    """Solution block ``A^{-1} M`` kept as part of the inverse of [[I, 0], [M, A]]."""

    def __init__(self, A: np.ndarray, M: np.ndarray, ring: Ring | None = None,
                 kernel: MulKernel | None = None):
        self.ring = ring or default_ring()
        A = np.array(A, dtype=np.int64)
        M = np.array(M, dtype=np.int64)
        if M.ndim == 1:
            M = M[:, None]
        n, k = A.shape[0], M.shape[1]
        if M.shape[0] != n or A.shape[1] != n:
            raise DimensionMismatch("A must be n x n and M must be n x k")
        self.n, self.k = n, k
        big = self.ring.eye(n + k)
        big[k:, :k] = M
        big[k:, k:] = A
        self.inv = ElementInverse(big, ring=self.ring, kernel=kernel)

    @property
    def A(self) -> np.ndarray:
        return self.inv.A[self.k:, self.k:]

    @property
    def M(self) -> np.ndarray:
        return self.inv.A[self.k:, :self.k]

    def set_a(self, i: int, j: int, v) -> None:
        self.inv.update([(self.k + i, self.k + j, v)])

    def set_m(self, i: int, j: int, v) -> None:
        self.inv.update([(self.k + i, j, v)])

    def replace_row(self, i: int, a_row, m_row=None) -> None:
        """Replace constraint ``i``: row ``i`` of A and optionally of M."""
        ch = [(self.k + i, self.k + c, int(x)) for c, x in enumerate(np.asarray(a_row).reshape(-1))]
        if m_row is not None:
            ch += [(self.k + i, c, int(x)) for c, x in enumerate(np.asarray(m_row).reshape(-1))]
        self.inv.update(ch)

    def solution(self, i: int, j: int):
        """Entry (i, j) of ``A^{-1} M``."""
        return self.ring.ssub(0, int(self.inv.query([self.k + i], [j])[0, 0]))

    def solution_column(self, j: int) -> np.ndarray:
        col = self.inv.query(np.arange(self.k, self.k + self.n), [j])[:, 0]
        return self.ring.neg(col)


def ls_update(s: LinearSystem, which: str, i: int, j: int, v) -> None:
    if which == "A":
        s.set_a(i, j, v)
    elif which == "M":
        s.set_m(i, j, v)
    else:
        raise ValueError("which must be 'A' or 'M'")


def ls_query_solution_entry(s: LinearSystem, i: int, j: int):
    return s.solution(i, j)


class ProductChain:
    """Consecutive products of factors ``A_0 ... A_{s-1}``.

    The factors sit on the block superdiagonal of a unipotent matrix whose
    inverse holds every consecutive product, up to sign.
    """

    def __init__(self, factors: Sequence[np.ndarray], ring: Ring | None = None,
                 kernel: MulKernel | None = None, k1: int | None = None, k2: int | None = None):
        self.ring = ring or default_ring()
        factors = [np.array(f, dtype=np.int64) for f in factors]
        if not factors:
            raise ValueError("need at least one factor")
        dims = [factors[0].shape[0]]
        for f in factors:
            if f.shape[0] != dims[-1]:
                raise DimensionMismatch("factor shapes do not chain")
            dims.append(f.shape[1])
        self.dims = dims
        self.offsets = np.concatenate([[0], np.cumsum(dims)]).astype(np.int64)
        size = int(self.offsets[-1])
        big = self.ring.eye(size)
        for r, f in enumerate(factors):
            big[self.offsets[r]:self.offsets[r + 1], self.offsets[r + 1]:self.offsets[r + 2]] = f
        self.s = len(factors)
        self.inv = ElementInverse(big, k1, k2, self.ring, kernel)

    def factor(self, r: int) -> np.ndarray:
        o = self.offsets
        return self.inv.A[o[r]:o[r + 1], o[r + 1]:o[r + 2]].copy()

    def _pos(self, which: int, i: int, j: int) -> tuple[int, int]:
        if not 0 <= which < self.s:
            raise IndexError("no such factor")
        if not (0 <= i < self.dims[which] and 0 <= j < self.dims[which + 1]):
            raise DimensionMismatch("entry outside the factor")
        return int(self.offsets[which] + i), int(self.offsets[which + 1] + j)

    def update(self, changes: Sequence[tuple[int, int, int, object]]) -> None:
        """Apply ``(factor, i, j, value)`` changes in one batch."""
        self.inv.update([self._pos(w, i, j) + (v,) for w, i, j, v in changes])

    def query(self, r: int, c: int, I, J) -> np.ndarray:
        """Block ``(A_r ... A_c)[I, J]`` for ``r <= c``."""
        if not 0 <= r <= c < self.s:
            raise IndexError("need 0 <= r <= c < number of factors")
        I = as_index(I, self.dims[r]) + self.offsets[r]
        J = as_index(J, self.dims[c + 1]) + self.offsets[c + 1]
        out = self.inv.query(I, J)
        return out if (c - r) % 2 == 1 else self.ring.neg(out)

    def entry(self, r: int, c: int, i: int, j: int):
        return self.query(r, c, [i], [j])[0, 0]


def chain_update(s: ProductChain, which: int, change: tuple[int, int, object]) -> None:
    i, j, v = change
    s.update([(which, i, j, v)])


def chain_query(s: ProductChain, r: int, c: int, i: int, j: int):
    return s.entry(r, c, i, j)


class RankTracker:
    """Rank of a matrix under element, column or row changes."""

    def __init__(self, A: np.ndarray | int, seed: int = 0, backend: str = "element",
                 ring=None, kernel: MulKernel | None = None):
        self.ss = SingularSafe(A, seed, backend, ring, kernel)

    def update(self, i: int, j: int, v) -> int:
        self.ss.update((i, j, v))
        return self.ss.rank()

    def update_column(self, j: int, v) -> int:
        self.ss.update_column(j, v)
        return self.ss.rank()

    def update_row(self, i: int, w) -> int:
        self.ss.update_row(i, w)
        return self.ss.rank()

    def rank(self) -> int:
        return self.ss.rank()
