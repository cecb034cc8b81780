"""Maintaining inverses of transformation matrices under column updates.

The central object is ``CombinedState``: it tracks the inverse of a matrix
``B`` that receives column updates, by keeping a base inverse that is
rebuilt every ``k1`` changed columns and, in between, an implicit
transformation ``I + B_base^{-1} S`` whose entries are fetched on demand.
"""
from __future__ import annotations

from typing import Protocol

import numpy as np

from .errors import DimensionMismatch, PreconditionViolated, Singular
from .matcore import (
    ColSparse,
    MulKernel,
    Ring,
    RowBlock,
    RowSparse,
    TransformRep,
    _swap,
    as_index,
    default_ring,
    invert_transform,
    mat_mul,
    tmul,
)


class ImplicitMatrix(Protocol):
    n: int

    def query(self, rows, cols) -> np.ndarray: ...


class DenseOracle:
    """An explicit matrix exposed through the ``query`` interface."""

    def __init__(self, a: np.ndarray):
        self.a = a
        self.n = a.shape[0]

    def query(self, rows, cols) -> np.ndarray:
        return self.a[np.ix_(as_index(rows), as_index(cols))].copy()


class ProductOracle:
    """Entries of ``I + a @ b`` computed on demand; ``a`` is an I+C matrix."""

    def __init__(self, a_ref: TransformRep, b_ref: np.ndarray, ring: Ring | None = None,
                 kernel: MulKernel | None = None):
        if b_ref.shape[0] != a_ref.n:
            raise DimensionMismatch("product factors do not chain")
        self.a_ref = a_ref
        self.b_ref = b_ref
        self.n = a_ref.n
        self.ring = ring or default_ring()
        self.kernel = kernel

    def query(self, rows, cols) -> np.ndarray:
        rows, cols = as_index(rows), as_index(cols)
        ring = self.ring
        a = self.a_ref
        block = RowBlock(self.n, rows, a.J, a.cols[rows])
        out = block.matmul(self.b_ref[:, cols], ring, self.kernel)
        eq = rows[:, None] == cols[None, :]
        rr, cc = np.nonzero(eq)
        out[rr, cc] = ring.add(out[rr, cc], ring.one())
        return out


def _as_transform(t) -> TransformRep:
    return t if isinstance(t, TransformRep) else TransformRep.from_dense(t)


def update_columns_inverse(t, t_inv, c: ColSparse, ring: Ring | None = None,
                           kernel: MulKernel | None = None) -> TransformRep:
    """Inverse of ``t + c`` given the inverse of ``t``.

    Writes ``t + c = t (I + t^{-1} c)``; the right factor differs from the
    identity only on the columns of ``c``.
    """
    ring = ring or default_ring()
    t_inv = _as_transform(t_inv)
    if c.n != t_inv.n:
        raise DimensionMismatch("update has the wrong dimension")
    if c.J.size == 0:
        return t_inv.copy()
    cols = t_inv.apply(c.vals, ring, kernel)
    one = ring.one()
    cols[c.J, np.arange(c.J.size)] = ring.add(cols[c.J, np.arange(c.J.size)], one)
    m = TransformRep(c.n, c.J, cols)
    try:
        m_inv = invert_transform(m, ring, kernel)
    except Singular as exc:
        raise Singular("column update makes the matrix singular", stage="column") from exc
    return tmul(m_inv, t_inv, ring, kernel)


def update_inverse(m: np.ndarray, m_inv: np.ndarray, c: ColSparse | None, r: RowSparse | None,
                   ring: Ring | None = None, kernel: MulKernel | None = None) -> np.ndarray:
    """Dense inverse of ``m + c + r``: a column update, then a transposed one."""
    ring = ring or default_ring()
    n = m.shape[0]
    c = c if c is not None else ColSparse.zero(n, ring)
    r = r if r is not None else RowSparse.zero(n, ring)
    mid = update_columns_inverse(m, m_inv, c, ring, kernel).densify(ring)
    if r.I.size == 0:
        return mid
    mc = m.copy()
    mc[:, c.J] = ring.add(mc[:, c.J], c.vals)
    try:
        out = update_columns_inverse(_swap(mc), _swap(mid), r.transpose(), ring, kernel)
    except Singular as exc:
        raise Singular("row update makes the matrix singular", stage="row") from exc
    return _swap(out.densify(ring))


class ImplicitTransformState:
    """Inverse of a matrix that is the identity outside the columns ``I_acc``.

    Only the block ``M`` on ``I_acc x I_acc`` and its inverse are stored; the
    remaining entries of the changed columns are read from ``d`` on demand.
    ``I_acc`` is kept sorted.
    """

    def __init__(self, d: ImplicitMatrix, ring: Ring | None = None, kernel: MulKernel | None = None):
        self.d = d
        self.n = d.n
        self.ring = ring or default_ring()
        self.kernel = kernel
        self.t = 0
        self.I_acc = np.zeros(0, dtype=np.int64)
        self.M = self.ring.zeros(0, 0)
        self.M_inv = self.ring.zeros(0, 0)

    def update(self, J) -> None:
        ring = self.ring
        J = np.unique(as_index(J, self.n))
        self.t += 1
        if J.size == 0:
            return
        old = self.I_acc
        new = np.setdiff1d(J, old)
        full = np.union1d(old, new)
        rows_j = self.d.query(J, full)
        cols_j = self.d.query(full, J)

        k_old, k = old.size, full.size
        # Work in the order (old indices, new indices), sort at the end.
        order = np.concatenate([old, new])
        where = np.searchsorted(full, order)
        rows_j = rows_j[:, where]
        cols_j = cols_j[where]
        in_old = np.isin(J, old)
        pos_j = np.searchsorted(old, J)
        pos_j = np.where(in_old, pos_j, k_old + np.searchsorted(new, J))

        # Rows of new indices outside J-columns: the block [[M, 0], [R, I]]
        # is triangular, so its inverse is explicit.
        r_part = rows_j[~in_old][:, :k_old].copy()
        keep = np.ones(k_old, dtype=bool)
        keep[pos_j[in_old]] = False
        r_part[:, ~keep] = 0
        g_inv = ring.zeros(k, k)
        g_inv[:k_old, :k_old] = self.M_inv
        g_inv[k_old:, :k_old] = ring.neg(mat_mul(r_part, self.M_inv, self.kernel, ring)) if k_old else r_part
        idx = np.arange(k_old, k)
        g_inv[idx, idx] = ring.one()
        g = ring.zeros(k, k)
        g[:k_old, :k_old] = self.M
        g[k_old:, :k_old] = r_part
        g[idx, idx] = ring.one()

        m_new = g.copy()
        m_new[:, pos_j] = cols_j
        m_new[pos_j, :] = rows_j
        delta = ColSparse(k, pos_j, ring.sub(m_new[:, pos_j], g[:, pos_j]))
        try:
            inv = update_columns_inverse(g, g_inv, delta, self.ring, self.kernel).densify(ring)
        except Singular as exc:
            raise Singular("pivot block of the transformation is singular") from exc

        back = np.argsort(order, kind="stable")
        self.I_acc = full
        self.M = m_new[np.ix_(back, back)]
        self.M_inv = inv[np.ix_(back, back)]

    def query(self, I) -> RowBlock:
        ring = self.ring
        I = as_index(I, self.n)
        acc = self.I_acc
        data = ring.zeros(I.size, acc.size)
        if acc.size == 0:
            return RowBlock(self.n, I, acc, data)
        pos = np.searchsorted(acc, I)
        pos_c = np.minimum(pos, acc.size - 1)
        inside = acc[pos_c] == I
        data[inside] = self.M_inv[pos_c[inside]]
        outside = np.flatnonzero(~inside)
        if outside.size:
            x = self.d.query(I[outside], acc)
            data[outside] = ring.neg(mat_mul(x, self.M_inv, self.kernel, ring))
        return RowBlock(self.n, I, acc.copy(), data)


def its_init(d: ImplicitMatrix, ring: Ring | None = None, kernel: MulKernel | None = None) -> ImplicitTransformState:
    return ImplicitTransformState(d, ring, kernel)


def its_update(s: ImplicitTransformState, J) -> None:
    s.update(J)


def its_query(s: ImplicitTransformState, I) -> RowBlock:
    return s.query(I)


class CombinedState:
    """Inverse of a matrix ``B`` under column updates, queried by submatrix.

    ``B = B_base + S``. Once ``k1`` distinct columns have changed since the
    last reset, ``B_base`` absorbs ``S`` and its inverse is recomputed from
    the old one.
    """

    def __init__(self, B0=None, k1: int = 1, eps2_cap: int | None = None, n: int | None = None,
                 ring: Ring | None = None, kernel: MulKernel | None = None):
        self.ring = ring or default_ring()
        self.kernel = kernel
        if k1 < 1:
            raise ValueError("k1 must be at least 1")
        self.k1 = int(k1)
        if B0 is None:
            if n is None:
                raise ValueError("either B0 or n is required")
            self.B_base = TransformRep.identity(n, self.ring)
            self.B_base_inv = TransformRep.identity(n, self.ring)
        elif isinstance(B0, TransformRep):
            self.B_base = B0.copy()
            self.B_base_inv = invert_transform(B0, self.ring, kernel)
        else:
            if B0.shape[0] != B0.shape[1]:
                raise DimensionMismatch("square matrix required")
            inv, _ = self.ring.gaussian_inverse(B0)
            self.B_base = TransformRep.from_dense(B0)
            self.B_base_inv = TransformRep.from_dense(inv)
        self.n = self.B_base.n
        self.eps2_cap = self.n if eps2_cap is None else int(eps2_cap)
        self.t = 0
        self.t_prime = 0
        self.resets = 0
        self.touched: set[int] = set()
        self.S = self.ring.zeros(self.n, self.n)
        self.changed = np.zeros(0, dtype=np.int64)
        self._fresh_inner()

    def _fresh_inner(self) -> None:
        self.oracle = ProductOracle(self.B_base_inv, self.S, self.ring, self.kernel)
        self.inner = ImplicitTransformState(self.oracle, self.ring, self.kernel)

    def current(self) -> np.ndarray:
        """The tracked matrix, densified (for tests and oracles)."""
        return self.ring.add(self.B_base.densify(self.ring), self.S)

    def update(self, c: ColSparse) -> None:
        ring = self.ring
        if c.n != self.n:
            raise DimensionMismatch("update has the wrong dimension")
        touched = self.touched | set(c.J.tolist())
        if len(touched) > self.eps2_cap:
            raise PreconditionViolated(
                f"{len(touched)} changed columns exceed the cap of {self.eps2_cap}")
        changed = np.union1d(self.changed, c.J)
        if changed.size >= self.k1:
            s_cols = ring.add(self.S[:, changed].copy(), ColSparse(self.n, c.J, c.vals).densify(ring)[:, changed])
            delta = ColSparse(self.n, changed, s_cols)
            new_inv = update_columns_inverse(self.B_base, self.B_base_inv, delta, ring, self.kernel)
            self.B_base = self.B_base.add_columns(delta, ring)
            self.B_base_inv = new_inv
            self.S = ring.zeros(self.n, self.n)
            self.changed = np.zeros(0, dtype=np.int64)
            self.t_prime = self.t + 1
            self.resets += 1
            self._fresh_inner()
        else:
            saved = self.S[:, c.J].copy()
            self.S[:, c.J] = ring.add(saved, c.vals)
            try:
                self.inner.update(c.J)
            except Singular:
                self.S[:, c.J] = saved
                raise
            self.changed = changed
        self.touched = touched
        self.t += 1

    def query_rows(self, I) -> RowBlock:
        """Rows ``I`` of the inverse, as a RowBlock."""
        return self.inner.query(I).times_transform(self.B_base_inv, self.ring, self.kernel)

    def query(self, I, J) -> np.ndarray:
        J = as_index(J, self.n)
        rows = self.inner.query(I)
        return rows.matmul(self.B_base_inv.dense_cols(J, self.ring), self.ring, self.kernel)


def combined_init(B0=None, k1: int = 1, eps2_cap: int | None = None, n: int | None = None,
                  ring: Ring | None = None, kernel: MulKernel | None = None) -> CombinedState:
    return CombinedState(B0, k1, eps2_cap, n, ring, kernel)


def combined_update(s: CombinedState, c: ColSparse) -> None:
    s.update(c)


def combined_query(s: CombinedState, I, J) -> np.ndarray:
    return s.query(I, J)
