"""Dynamic inverse structures built on the transformation layer.

``ElementInverse`` handles entry updates and submatrix queries,
``ColumnInverse`` handles column updates and row queries.
``SubmatrixMirror`` keeps a fixed block of the inverse explicit,
``Deamortized`` spreads rebuilds over a cycle of rounds, and
``SingularSafe`` embeds a possibly singular matrix to track its rank.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import FAIL, DimensionMismatch, PreconditionViolated, Singular, UnsupportedUpdate
from .matcore import (
    ColSparse,
    MulKernel,
    Ring,
    RowBlock,
    as_index,
    default_ring,
    mat_mul,
    partial_invert,
)
from .transform import CombinedState, update_columns_inverse

Change = tuple[int, int, object]


def default_k1(n: int) -> int:
    return max(1, math.ceil(n ** 0.5))


def default_k2(n: int) -> int:
    return max(1, math.ceil(n ** 0.75))


def _collapse(changes: Iterable[Change], n: int, ring: Ring) -> dict[tuple[int, int], object]:
    """Last value wins for repeated positions."""
    out: dict[tuple[int, int], object] = {}
    for i, j, v in changes:
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"entry ({i}, {j}) out of range for n={n}")
        out[(i, j)] = ring.lift(v)
    return out


class ElementInverse:
    """Inverse of ``A`` under entry updates, answering submatrix queries.

    Keeps ``A = A0 @ T`` where ``T`` differs from the identity only in the
    columns changed since the last rebuild of ``A0^{-1}``; the inverse of
    ``T`` lives in a ``CombinedState``.
    """

    def __init__(self, A0: np.ndarray, k1: int | None = None, k2: int | None = None,
                 ring: Ring | None = None, kernel: MulKernel | None = None,
                 A0_inv: np.ndarray | None = None):
        self.ring = ring or default_ring()
        self.kernel = kernel
        A0 = np.array(A0, dtype=np.int64)
        if A0.shape[0] != A0.shape[1]:
            raise DimensionMismatch("square matrix required")
        self.n = n = A0.shape[0]
        self.k2 = default_k2(n) if k2 is None else int(k2)
        self.k1 = min(default_k1(n) if k1 is None else int(k1), self.k2)
        if self.k2 < 1 or self.k1 < 1:
            raise ValueError("thresholds must be positive")
        if A0_inv is None:
            A0_inv, _ = self.ring.gaussian_inverse(A0)
        self.A0 = A0
        self.A0_inv = A0_inv
        self.A = A0.copy()
        self.resets = 0
        self._restart()

    def _restart(self) -> None:
        self.changed_cols = np.zeros(0, dtype=np.int64)
        self.inner = CombinedState(None, self.k1, self.k2, n=self.n, ring=self.ring, kernel=self.kernel)

    @property
    def S(self) -> np.ndarray:
        return self.ring.sub(self.A, self.A0)

    def _transform_delta(self, deltas: dict[tuple[int, int], object]) -> ColSparse:
        ring = self.ring
        by_col: dict[int, list[tuple[int, object]]] = {}
        for (i, j), d in deltas.items():
            by_col.setdefault(j, []).append((i, d))
        cols = sorted(by_col)
        vals = ring.zeros(self.n, len(cols))
        for k, j in enumerate(cols):
            rows = [i for i, _ in by_col[j]]
            d = np.stack([np.asarray(x) for _, x in by_col[j]]).reshape((len(rows), 1) + vals.shape[2:])
            vals[:, k:k + 1] = mat_mul(self.A0_inv[:, rows], d, self.kernel, ring)
        return ColSparse(self.n, cols, vals)

    def update(self, changes: Sequence[Change]) -> None:
        """Apply a batch of ``(i, j, new_value)`` changes atomically."""
        ring = self.ring
        target = _collapse(changes, self.n, ring)
        deltas = {}
        for (i, j), v in target.items():
            d = ring.ssub(v, self.A[i, j])
            if not ring.is_zero(d):
                deltas[(i, j)] = d
        cols = np.array(sorted({j for _, j in deltas}), dtype=np.int64)
        if cols.size == 0:
            return
        changed = np.union1d(self.changed_cols, cols)
        new_a = self.A.copy()
        for (i, j), v in target.items():
            new_a[i, j] = v
        if changed.size >= self.k2:
            diff = ring.sub(new_a, self.A0)
            delta = ColSparse(self.n, changed, diff[:, changed])
            new_inv = update_columns_inverse(self.A0, self.A0_inv, delta, ring, self.kernel).densify(ring)
            self.A0 = new_a.copy()
            self.A0_inv = new_inv
            self.A = new_a
            self.resets += 1
            self._restart()
            return
        self.inner.update(self._transform_delta(deltas))
        self.A = new_a
        self.changed_cols = changed

    def set(self, i: int, j: int, value) -> None:
        self.update([(i, j, value)])

    def query_rows(self, I) -> RowBlock:
        """Rows of ``T^{-1}``; multiply by ``A0_inv`` to get rows of the inverse."""
        return self.inner.query_rows(I)

    def query(self, I, J) -> np.ndarray:
        J = as_index(J, self.n)
        return self.inner.query_rows(I).matmul(self.A0_inv[:, J], self.ring, self.kernel)

    def entry(self, i: int, j: int):
        return self.query([i], [j])[0, 0]

    def row(self, i: int) -> np.ndarray:
        return self.query([i], np.arange(self.n))[0]

    def column(self, j: int) -> np.ndarray:
        return self.query(np.arange(self.n), [j])[:, 0]


def ei_update(s: ElementInverse, changes: Sequence[Change]) -> None:
    s.update(changes)


def ei_query(s: ElementInverse, I, J) -> np.ndarray:
    return s.query(I, J)


class ColumnInverse:
    """Inverse of ``A`` under column replacement, answering row queries."""

    def __init__(self, A: np.ndarray, k1: int | None = None, ring: Ring | None = None,
                 kernel: MulKernel | None = None):
        self.ring = ring or default_ring()
        self.kernel = kernel
        A = np.array(A, dtype=np.int64)
        self.n = A.shape[0]
        self.k1 = default_k1(self.n) if k1 is None else int(k1)
        self.state = CombinedState(A, self.k1, self.n, ring=self.ring, kernel=kernel)
        self.A = A.copy()

    @property
    def resets(self) -> int:
        return self.state.resets

    def update_columns(self, J, V: np.ndarray) -> None:
        J = as_index(J, self.n)
        if len(set(J.tolist())) != J.size:
            raise ValueError("repeated column in one batch")
        delta = self.ring.sub(V, self.A[:, J])
        self.state.update(ColSparse(self.n, J, delta))
        self.A[:, J] = V

    def update(self, j: int, v) -> None:
        v = np.asarray(v, dtype=np.int64)
        self.update_columns([j], v.reshape((self.n, 1) + v.shape[1:]) % self.ring.p)

    def query_row(self, i: int) -> np.ndarray:
        return self.state.query_rows([i]).densify(self.ring)[0]

    def query(self, I, J) -> np.ndarray:
        return self.state.query(I, J)

    def entry(self, i: int, j: int):
        return self.query([i], [j])[0, 0]


def ci_update(s: ColumnInverse, j: int, v) -> None:
    s.update(j, v)


def ci_query(s: ColumnInverse, i: int) -> np.ndarray:
    return s.query_row(i)


class _KnownRows:
    """Rows of a one-column I+C matrix that the caller actually holds."""

    def __init__(self, n: int, j: int, rows: np.ndarray, col: np.ndarray):
        self.n = n
        self.J = np.array([j], dtype=np.int64)
        self._pos = {r: k for k, r in enumerate(rows.tolist())}
        self._col = col

    def take_rows(self, I) -> np.ndarray:
        idx = [self._pos[r] for r in as_index(I).tolist()]
        return self._col[idx].reshape((len(idx), 1) + self._col.shape[1:])


class SubmatrixMirror:
    """Keeps ``inverse[H, H]`` explicit on top of an ElementInverse."""

    def __init__(self, ei: ElementInverse, H):
        self.ei = ei
        self.ring = ei.ring
        self.H = as_index(H, ei.n)
        self._pos = {h: k for k, h in enumerate(self.H.tolist())}
        self.block = ei.query(self.H, self.H) if self.H.size else self.ring.zeros(0, 0)

    def update(self, change: Change) -> None:
        ring, ei = self.ring, self.ei
        i, j, v = change
        if self.H.size == 0:
            ei.update([change])
            return
        delta = ring.ssub(ring.lift(v), ei.A[i, j])
        if ring.is_zero(delta):
            return
        rows = np.concatenate([self.H, [j]])
        col_i = ei.query(rows, [i])[:, 0]
        row_j = ei.query([j], self.H)
        ei.update([change])
        # T = I + (inverse[:, i] * delta) e_j^T; only rows H and j are needed.
        d = np.asarray(delta).reshape((1, 1) + col_i.shape[1:])
        t_col = ring.matmul(col_i[:, None], d)[:, 0]
        at_j = rows == j
        t_col[at_j] = ring.add(t_col[at_j], ring.one())
        rows_inv = partial_invert(_KnownRows(ei.n, j, rows, t_col), rows, ring)
        coeff = rows_inv.data[:-1, 0].copy()
        mask = at_j[:-1]
        coeff[mask] = ring.sub(coeff[mask], ring.one())
        upd = mat_mul(coeff.reshape((self.H.size, 1) + coeff.shape[1:]), row_j, None, ring)
        self.block = ring.add(self.block, upd)

    def entry(self, a: int, b: int):
        return self.block[self._pos[a], self._pos[b]]


def sm_update(m: SubmatrixMirror, change: Change) -> None:
    m.update(change)


class _Rebuild:
    """Gauss-Jordan inversion that can be advanced a few pivots at a time."""

    def __init__(self, a: np.ndarray, ring: Ring):
        self.ring = ring
        self.n = n = a.shape[0]
        self.aug = np.concatenate([a.copy(), ring.eye(n)], axis=1)
        self.step = 0

    @property
    def done(self) -> bool:
        return self.step >= self.n

    def advance(self, pivots: int) -> None:
        ring, aug, n = self.ring, self.aug, self.n
        for _ in range(pivots):
            if self.done:
                return
            c = self.step
            cand = [r for r in range(c, n) if ring.is_unit(aug[r, c])]
            if not cand:
                raise Singular("snapshot is singular")
            r = cand[0]
            if r != c:
                aug[[c, r]] = aug[[r, c]]
            piv_inv = ring.sinv(aug[c, c])
            aug[c] = ring.scale(aug[c:c + 1], piv_inv)[0]
            colv = aug[:, c:c + 1].copy()
            colv[c] = ring.zero()
            aug[:] = ring.sub(aug, ring.matmul(colv, aug[c:c + 1]))
            self.step += 1

    def result(self) -> np.ndarray:
        return self.aug[:, self.n:].copy()


class Deamortized:
    """Two phase-shifted copies so that one is always fully up to date.

    A cycle has ``mu`` rounds (one update per round). A copy spends the
    first quarter rebuilding from a snapshot, the second quarter replaying
    queued updates at double speed, and the second half serving queries.
    """

    def __init__(self, A: np.ndarray, mu: int, factory: Callable | None = None,
                 ring: Ring | None = None, batch_size: int = 1):
        if mu < 4 or mu % 4:
            raise ValueError("mu must be a positive multiple of 4")
        self.ring = ring or default_ring()
        self.mu = mu
        self.batch_size = batch_size
        self.factory = factory or (lambda a, a_inv: ElementInverse(a, ring=self.ring, A0_inv=a_inv))
        self.A = np.array(A, dtype=np.int64)
        self.n = self.A.shape[0]
        inv, _ = self.ring.gaussian_inverse(self.A)
        # copy 0 starts its rebuild at round 0; copy 1 is half a cycle ahead
        self.offsets = (0, mu // 2)
        self.copies = [None, self.factory(self.A.copy(), inv)]
        self.queues: list[list] = [[], []]
        self.jobs: list[_Rebuild | None] = [None, None]
        self.snapshots: list[np.ndarray | None] = [None, None]
        self.t = 0
        quarter = mu // 4
        self.slice_pivots = -(-self.n // quarter)
        self.round_work: list[int] = []
        self.bound = 3  # one rebuild slice or two replays, plus one direct update

    def _pos(self, c: int, t: int | None = None) -> int:
        return ((self.t if t is None else t) + self.offsets[c]) % self.mu

    def available(self) -> int:
        for c in (0, 1):
            if self._pos(c) >= self.mu // 2:
                return c
        raise AssertionError("no copy available")

    def update(self, changes: Sequence[Change]) -> None:
        changes = list(changes)
        if len(changes) != self.batch_size:
            raise PreconditionViolated(f"batch size is fixed at {self.batch_size}")
        quarter = self.mu // 4
        avail = self.available()
        # applying to the serving copy first makes a rejected update harmless
        self.copies[avail].update(changes)
        work = 1
        for c in (0, 1):
            if c == avail:
                continue
            pos = self._pos(c)
            if pos == 0:
                self.snapshots[c] = self.A.copy()
                self.jobs[c] = _Rebuild(self.A, self.ring)
                self.queues[c] = []
                self.copies[c] = None
            if pos < quarter:
                self.jobs[c].advance(self.slice_pivots)
                work += 1
                self.queues[c].append(changes)
                if pos == quarter - 1:
                    self.jobs[c].advance(self.n)
                    self.copies[c] = self.factory(self.snapshots[c], self.jobs[c].result())
                    self.jobs[c] = None
            elif pos < 2 * quarter:
                self.queues[c].append(changes)
                for _ in range(2):
                    if self.queues[c]:
                        self.copies[c].update(self.queues[c].pop(0))
                        work += 1
            else:
                self.copies[c].update(changes)
                work += 1
        for i, j, v in changes:
            self.A[i, j] = self.ring.lift(v)
        self.round_work.append(work)
        self.t += 1

    def query(self, I, J) -> np.ndarray:
        return self.copies[self.available()].query(I, J)


def deamortize(factory: Callable, mu: int, A: np.ndarray, ring: Ring | None = None,
               batch_size: int = 1) -> Deamortized:
    return Deamortized(A, mu, factory, ring, batch_size)


class SingularSafe:
    """Rank and inverse of a possibly singular matrix via a 3n x 3n embedding.

    The embedding is ``[[A, X, 0], [Y, 0, I], [0, I, D_k]]`` where ``D_k``
    has ones on its first ``k`` diagonal positions. For random ``X, Y`` it
    is nonsingular exactly when ``rank(A) >= n - k``; ``k`` is kept minimal.
    Every change is tested through its determinant factor before it is
    applied, so the embedding never becomes singular.
    """

    def __init__(self, A: np.ndarray | int, seed: int = 0, backend: str = "element",
                 ring=None, kernel: MulKernel | None = None,
                 k1: int | None = None, k2: int | None = None):
        self.ring = ring or default_ring()
        if isinstance(A, (int, np.integer)):
            A = self.ring.zeros(int(A), int(A))
        A = np.array(A, dtype=np.int64)
        n = self.n = A.shape[0]
        if backend not in ("element", "column"):
            raise ValueError("backend must be 'element' or 'column'")
        self.backend = backend
        rng = np.random.default_rng(seed)
        self.X = self.ring.random(rng, (n, n))
        self.Y = self.ring.random(rng, (n, n))
        self.k = n - self.ring.rank(A)
        big = self.ring.zeros(3 * n, 3 * n)
        big[:n, :n] = A
        big[:n, n:2 * n] = self.X
        big[n:2 * n, :n] = self.Y
        eye = np.arange(n)
        big[n + eye, 2 * n + eye] = 1
        big[2 * n + eye, n + eye] = 1
        big[2 * n + np.arange(self.k), 2 * n + np.arange(self.k)] = 1
        inv, det_big = self.ring.gaussian_inverse(big)
        if backend == "element":
            self.inner = ElementInverse(big, k1, k2, self.ring, kernel, A0_inv=inv)
        else:
            self.inner = ColumnInverse(big, k1, self.ring, kernel)
        self.det_tilde = det_big
        self._det_a = self.ring.det(A) if self.k == 0 else 0
        self._det_known = True

    @property
    def A(self) -> np.ndarray:
        return self.inner.A[:self.n, :self.n].copy()

    @property
    def matrix(self) -> np.ndarray:
        return self.inner.A

    def _big_row(self, r: int) -> np.ndarray:
        if self.backend == "element":
            return self.inner.query([r], np.arange(3 * self.n))[0]
        return self.inner.query_row(r)

    def _big_entry(self, r: int, c: int) -> int:
        if self.backend == "element":
            return int(self.inner.query([r], [c])[0, 0])
        return int(self.inner.query_row(r)[c])

    def _apply_column(self, j: int, new_col: np.ndarray) -> None:
        if self.backend == "element":
            changes = [(int(r), j, int(new_col[r])) for r in np.flatnonzero(new_col != self.inner.A[:, j])]
            if changes:
                self.inner.update(changes)
        else:
            self.inner.update(j, new_col)

    def _toggle_slot(self, up: bool) -> bool:
        """Grow (or shrink) the identity tail by one; False if that is singular."""
        ring = self.ring
        s = 2 * self.n + (self.k if up else self.k - 1)
        sign = 1 if up else ring.ssub(0, 1)
        f = ring.sadd(1, ring.smul(sign, self._big_entry(s, s)))
        if f == 0:
            return False
        col = self.inner.A[:, s].copy()
        col[s] = 1 if up else 0
        self._apply_column(s, col)
        self.det_tilde = ring.smul(self.det_tilde, f)
        self.k += 1 if up else -1
        self._det_known = False
        return True

    def _commit(self, factor_fn, apply_fn) -> None:
        ring = self.ring
        was_full = self.k == 0
        while True:
            f = factor_fn()
            if f != 0:
                break
            if self.k >= self.n or not self._toggle_slot(True):
                raise Singular("embedding could not absorb the update")
        apply_fn()
        self.det_tilde = ring.smul(self.det_tilde, f)
        if self._det_known and was_full and self.k == 0:
            self._det_a = ring.smul(self._det_a, f)
        else:
            self._det_known = False
        if self.k > 0:
            self._toggle_slot(False)

    def update(self, change: Change) -> None:
        """Set ``A[i, j]``; never raises for singular results."""
        ring = self.ring
        i, j, v = change
        i, j = int(i), int(j)
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError("entry out of range")
        v = ring.lift(v)
        delta = ring.ssub(v, int(self.inner.A[i, j]))
        if delta == 0:
            return

        def factor():
            return ring.sadd(1, ring.smul(delta, self._big_entry(j, i)))

        def apply():
            if self.backend == "element":
                self.inner.update([(i, j, v)])
            else:
                col = self.inner.A[:, j].copy()
                col[i] = v
                self.inner.update(j, col)

        self._commit(factor, apply)

    def update_column(self, j: int, v) -> None:
        ring = self.ring
        v = ring.asarray(np.asarray(v).reshape(self.n))
        delta = ring.sub(v, self.inner.A[:self.n, j])
        if not delta.any():
            return

        def factor():
            row = self._big_row(j)[:self.n]
            return ring.sadd(1, int(ring.matmul(row[None, :], delta[:, None])[0, 0]))

        def apply():
            col = self.inner.A[:, j].copy()
            col[:self.n] = v
            self._apply_column(j, col)

        self._commit(factor, apply)

    def update_row(self, i: int, w) -> None:
        if self.backend != "element":
            raise UnsupportedUpdate("row updates need the element backend")
        ring = self.ring
        w = ring.asarray(np.asarray(w).reshape(self.n))
        delta = ring.sub(w, self.inner.A[i, :self.n])
        if not delta.any():
            return

        def factor():
            col = self.inner.query(np.arange(self.n), [i])[:, 0]
            return ring.sadd(1, int(ring.matmul(delta[None, :], col[:, None])[0, 0]))

        def apply():
            nz = np.flatnonzero(delta)
            self.inner.update([(i, int(c), int(w[c])) for c in nz])

        self._commit(factor, apply)

    def rank(self) -> int:
        return self.n - self.k

    def query(self, i: int, j: int):
        if self.k > 0:
            return FAIL
        return self._big_entry(i, j)

    def row(self, i: int):
        """Row ``i`` of the inverse, or FAIL while ``A`` is singular."""
        if self.k > 0:
            return FAIL
        return self._big_row(i)[:self.n].copy()

    def det(self) -> int:
        if self.k > 0:
            return 0
        if not self._det_known:
            self._det_a = self.ring.det(self.A)
            self._det_known = True
        return self._det_a


def ss_update(s: SingularSafe, change: Change) -> None:
    s.update(change)


def ss_rank(s: SingularSafe) -> int:
    return s.rank()


def ss_query(s: SingularSafe, i: int, j: int):
    return s.query(i, j)
