"""Inverse maintenance when upcoming update positions are predictable.

A ``LookAheadSchedule`` promises, at every round ``t``, nested sets
``F_i^{(t)}`` that contain every position touched in rounds ``t+1..t+i``.
``Hierarchy`` keeps only the rows of the inverse that those promises say
will be needed, refreshing level ``i`` every ``2^(i-1)`` rounds.
``CombinedLookAhead`` runs epochs of hierarchy rounds on top of a
``CombinedState``; ``online_rank`` and ``online_bipartite_matching`` use it.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import PreconditionViolated, ScheduleViolation
from .matcore import ColSparse, Ring, as_index, default_ring, partial_invert
from .transform import CombinedState

Generator = Callable[[int, int], Iterable[int]]


class LookAheadSchedule:
    """Nested predicted-position sets, materialized lazily and then frozen.

    ``generator(t, i)`` returns ``F_i^{(t)}``; it is called at most once per
    ``(t, i)``, so adaptive generators may read live state.
    """

    def __init__(self, n: int, s: int, horizon: int, generator: Generator):
        self.n, self.s, self.horizon = n, s, horizon
        self.generator = generator
        self._cache: dict[tuple[int, int], frozenset] = {}
        self.ops: list[tuple[int, int]] = []

    def family(self, t: int, i: int) -> frozenset:
        if i <= 0:
            return frozenset()
        i = min(i, self.horizon)
        key = (t, i)
        if key not in self._cache:
            got = frozenset(int(x) for x in self.generator(t, i) if 0 <= int(x) < self.n)
            self._cache[key] = got
        return self._cache[key]

    def materialize(self, t: int) -> None:
        for i in range(1, self.horizon + 1):
            self.family(t, i)

    def increments(self, t: int) -> list[frozenset]:
        """Disjoint pieces whose prefix unions give ``F_i^{(t)}``."""
        out, seen = [frozenset()], frozenset()
        for i in range(1, self.horizon + 1):
            f = self.family(t, i)
            out.append(f - seen)
            seen = seen | f
        return out

    def check_op(self, t: int, pos: int) -> None:
        """The op of round ``t`` (1-based) must have been predicted at ``t - 1``."""
        if pos not in self.family(t - 1, 1):
            raise ScheduleViolation(f"position {pos} at round {t} was not predicted")
        self.ops.append((t, pos))


def check_schedule(sched: LookAheadSchedule, rounds: int | None = None) -> list[str]:
    """Problems with the size and nesting conditions, plus uncovered ops."""
    problems = []
    times = sorted({t for t, _ in sched._cache})
    if rounds is not None:
        times = [t for t in times if t <= rounds]
    for t in times:
        for i in range(1, sched.horizon + 1):
            if (t, i) in sched._cache and len(sched._cache[(t, i)]) > sched.s * i:
                problems.append(f"|F_{i}^({t})| = {len(sched._cache[(t, i)])} > {sched.s * i}")
    for t1 in times:
        for t2 in times:
            if t2 < t1 or t2 - t1 > sched.horizon:
                continue
            for i1 in range(1, sched.horizon + 1):
                if (t1, i1) not in sched._cache:
                    continue
                for i2 in range(1, i1 - (t2 - t1) + 1):
                    if (t2, i2) in sched._cache and not sched._cache[(t2, i2)] <= sched._cache[(t1, i1)]:
                        problems.append(f"F_{i2}^({t2}) not inside F_{i1}^({t1})")
    for t, pos in sched.ops:
        for i in range(1, sched.horizon + 1):
            src = t - i
            if (src, i) in sched._cache and pos not in sched._cache[(src, i)]:
                problems.append(f"op at round {t} (position {pos}) missing from F_{i}^({src})")
    return problems


def exact_schedule(positions: Sequence[int], n: int, horizon: int) -> LookAheadSchedule:
    """Schedule that knows the exact position of every future round."""
    pos = [int(x) for x in positions]
    return LookAheadSchedule(n, 1, horizon, lambda t, i: pos[t:t + i])


def slack_schedule(positions: Sequence[int], n: int, horizon: int) -> LookAheadSchedule:
    """Twice as loose as needed: each predicted position brings a neighbour."""
    pos = [int(x) for x in positions]
    return LookAheadSchedule(n, 2, horizon,
                             lambda t, i: [q for x in pos[t:t + i] for q in (x, (x + 1) % n)])


def partial_update_inverse(I, T_inv_rows: np.ndarray, C: ColSparse, ring: Ring | None = None) -> np.ndarray:
    """Rows ``I`` of ``(T + C)^{-1}`` from rows ``I`` of ``T^{-1}``.

    Needs every changed column of ``C`` to be among ``I``.
    """
    ring = ring or default_ring()
    I = as_index(I)
    if C.J.size == 0:
        return T_inv_rows.copy()
    first: dict[int, int] = {}
    for k, r in enumerate(I.tolist()):
        first.setdefault(r, k)
    if any(j not in first for j in C.J.tolist()):
        raise PreconditionViolated("changed columns must be among the requested rows")
    posJ = np.array([first[j] for j in C.J.tolist()], dtype=np.int64)
    eye_block = ring.zeros(I.size, C.J.size)
    rr, cc = np.nonzero(I[:, None] == C.J[None, :])
    eye_block[rr, cc] = ring.one()
    rows = ring.add(eye_block, ring.matmul(T_inv_rows, C.vals))

    class _Rows:
        n = C.n
        J = C.J

        @staticmethod
        def take_rows(idx):
            return rows

    m_inv = partial_invert(_Rows, I, ring).data
    return ring.add(T_inv_rows, ring.matmul(ring.sub(m_inv, eye_block), T_inv_rows[posJ]))


class _Level:
    __slots__ = ("rows", "data", "tau", "_pos")

    def __init__(self, rows: np.ndarray, data: np.ndarray, tau: int):
        self.rows, self.data, self.tau = rows, data, tau
        self._pos = {r: k for k, r in enumerate(rows.tolist())}

    def has(self, r: int) -> bool:
        return r in self._pos

    def take(self, rows: np.ndarray) -> np.ndarray:
        return self.data[[self._pos[r] for r in rows.tolist()]]


class Hierarchy:
    """Rows of the inverse over one epoch of at most ``horizon - 1`` rounds.

    Level ``L + 1`` holds base rows ``F^{(t0)}_horizon``; level ``i`` is
    refreshed from level ``i + 1`` whenever ``2^(i-1)`` divides the local
    round, so level 1 is current after every round.
    """

    def __init__(self, n: int, horizon: int, schedule: LookAheadSchedule, base_rows: Callable,
                 t0: int = 0, ring: Ring | None = None):
        if horizon < 2 or horizon & (horizon - 1):
            raise ValueError("horizon must be a power of two, at least 2")
        self.ring = ring or default_ring()
        self.n, self.horizon, self.schedule, self.t0 = n, horizon, schedule, t0
        self.L = int(math.log2(horizon))
        rows = np.array(sorted(schedule.family(t0, horizon)), dtype=np.int64)
        base = _Level(rows, base_rows(rows), 0)
        self.levels: list[_Level] = [base] * (self.L + 2)  # index 0 unused
        self.log: list[tuple[int, int, np.ndarray | None]] = []
        self.t = 0
        self.refresh_rows = 0

    def _refresh(self, i: int) -> None:
        ring = self.ring
        src = self.levels[i + 1]
        window = [(j, d) for (r, j, d) in self.log if src.tau < r <= self.t]
        positions = sorted({j for j, _ in window})
        for j in positions:
            if not src.has(j):
                raise ScheduleViolation(f"position {j} missing from level {i + 1}")
        need = set(self.schedule.family(self.t0 + self.t, 2 ** i)) | set(positions)
        rows = np.array(sorted(r for r in need if src.has(r)), dtype=np.int64)
        net: dict[int, np.ndarray] = {}
        for j, d in window:
            if d is not None:
                net[j] = ring.add(net[j], d) if j in net else d.copy()
        cols = sorted(net)
        vals = ring.zeros(self.n, len(cols))
        for k, j in enumerate(cols):
            vals[:, k] = net[j]
        data = partial_update_inverse(rows, src.take(rows), ColSparse(self.n, cols, vals), ring)
        self.levels[i] = _Level(rows, data, self.t)
        self.refresh_rows += rows.size

    def step(self, j: int, delta: np.ndarray | None) -> None:
        """One round at position ``j``; ``delta`` is the column change or None."""
        if self.t + 1 >= self.horizon:
            raise PreconditionViolated("epoch exhausted; start a new hierarchy")
        self.schedule.check_op(self.t0 + self.t + 1, j)
        self.t += 1
        self.log.append((self.t, j, delta))
        for i in range(1, self.L + 1):
            if self.t % (2 ** (i - 1)) == 0:
                self._refresh(i)

    def row(self, j: int) -> np.ndarray:
        top = self.levels[1]
        if not top.has(j):
            raise ScheduleViolation(f"row {j} was not predicted")
        return top.take(np.array([j]))[0].copy()


def la_update(h: Hierarchy, sched: LookAheadSchedule, j: int, delta) -> None:
    h.step(j, None if delta is None else np.asarray(delta, dtype=np.int64))


def la_query(h: Hierarchy, sched: LookAheadSchedule, j: int) -> np.ndarray:
    h.step(j, None)
    return h.row(j)


class CombinedLookAhead:
    """Unbounded rounds: epochs of ``horizon - 1`` hierarchy rounds, each
    closed by handing the epoch's net column changes to a CombinedState."""

    def __init__(self, schedule: LookAheadSchedule, B0: np.ndarray | None = None, n: int | None = None,
                 horizon: int = 8, k1: int | None = None, ring: Ring | None = None):
        self.ring = ring or default_ring()
        if B0 is None:
            if n is None:
                raise ValueError("either B0 or n is required")
            B0 = self.ring.eye(n)
        self.B = np.array(B0, dtype=np.int64)
        self.n = self.B.shape[0]
        self.horizon = horizon
        self.schedule = schedule
        k1 = k1 if k1 is not None else max(1, math.ceil(self.n ** 0.5))
        self.outer = CombinedState(self.B, k1, self.n, ring=self.ring)
        self.t = 0
        self.epochs = 0
        self._start_epoch()

    def _base_rows(self, rows: np.ndarray) -> np.ndarray:
        if rows.size == 0:
            return self.ring.zeros(0, self.n)
        return self.outer.query_rows(rows).densify(self.ring)

    def _start_epoch(self) -> None:
        self.pending: dict[int, np.ndarray] = {}
        self.h = Hierarchy(self.n, self.horizon, self.schedule, self._base_rows, self.t, self.ring)

    def _close_epoch(self) -> None:
        if self.pending:
            cols = sorted(self.pending)
            vals = self.ring.zeros(self.n, len(cols))
            for k, j in enumerate(cols):
                vals[:, k] = self.pending[j]
            self.outer.update(ColSparse(self.n, cols, vals))
        self.epochs += 1
        self._start_epoch()

    def _round(self, j: int, delta: np.ndarray | None) -> None:
        self.h.step(j, delta)
        self.t += 1
        if delta is not None:
            self.pending[j] = self.ring.add(self.pending[j], delta) if j in self.pending else delta.copy()

    def _after(self) -> None:
        self.schedule.materialize(self.t)
        if self.h.t + 1 >= self.horizon:
            self._close_epoch()

    def update(self, j: int, v) -> None:
        """Replace column ``j`` by ``v``."""
        v = np.asarray(v, dtype=np.int64).reshape(self.n) % self.ring.p
        delta = self.ring.sub(v, self.B[:, j])
        self._round(j, delta)
        self.B[:, j] = v
        self._after()

    def query_row(self, j: int) -> np.ndarray:
        self._round(j, None)
        out = self.h.row(j)
        self._after()
        return out


def cla_update(s: CombinedLookAhead, j: int, v) -> None:
    s.update(j, v)


def cla_query(s: CombinedLookAhead, j: int) -> np.ndarray:
    return s.query_row(j)


class OnlineRank:
    """Rank of ``A`` as its columns are revealed left to right.

    ``A`` starts at zero. The rank embedding
    ``[[A, X, 0], [Y, 0, I], [0, I, D_k]]`` is maintained by a
    ``CombinedLookAhead``; every round touches column ``c`` or a slot near
    ``2n + k``, which makes the schedule a narrow band.
    """

    def __init__(self, n: int, seed: int = 0, horizon: int | None = None, ring=None):
        self.ring = ring or default_ring()
        self.n = n
        rng = np.random.default_rng(seed)
        X = self.ring.random(rng, (n, n))
        Y = self.ring.random(rng, (n, n))
        big = self.ring.zeros(3 * n, 3 * n)
        big[:n, n:2 * n] = X
        big[n:2 * n, :n] = Y
        e = np.arange(n)
        big[n + e, 2 * n + e] = 1
        big[2 * n + e, n + e] = 1
        big[2 * n + e, 2 * n + e] = 1
        self.k = n
        self.c = 0
        if horizon is None:
            horizon = 2 ** max(1, math.ceil(math.log2(max(2.0, (3 * n) ** 0.5))))
        self.schedule = LookAheadSchedule(3 * n, 7, horizon, self._band)
        self.cla = CombinedLookAhead(self.schedule, big, horizon=horizon, ring=self.ring)

    def _band(self, t: int, i: int) -> list[int]:
        n, c, k = self.n, self.c, self.k
        cols = range(c, min(n, c + i + 1))
        lo, hi = max(2 * n, 2 * n + k - i - 1), min(3 * n - 1, 2 * n + k + i + 1)
        return list(cols) + list(range(lo, hi + 1))

    def _entry(self, r: int, c: int) -> int:
        return int(self.cla.query_row(r)[c])

    def _toggle(self, up: bool) -> bool:
        ring = self.ring
        s = 2 * self.n + (self.k if up else self.k - 1)
        d = self._entry(s, s)
        f = ring.sadd(1, d) if up else ring.ssub(1, d)
        if f == 0:
            return False
        col = self.cla.B[:, s].copy()
        col[s] = 1 if up else 0
        # the band for the new round is read during the update, so move k first
        self.k += 1 if up else -1
        self.cla.update(s, col)
        return True

    def add_column(self, v) -> int:
        """Reveal the next column of ``A``; returns the new rank."""
        ring = self.ring
        if self.c >= self.n:
            raise IndexError("all columns already revealed")
        n, c = self.n, self.c
        v = np.asarray(v, dtype=np.int64).reshape(n) % ring.p
        delta = ring.sub(v, self.cla.B[:n, c])
        if delta.any():
            while True:
                row = self.cla.query_row(c)[:n]
                f = ring.sadd(1, int(ring.matmul(row[None, :], delta[:, None])[0, 0]))
                if f != 0:
                    break
                if self.k >= n or not self._toggle(True):
                    raise RuntimeError("rank embedding failed to absorb a column")
            col = self.cla.B[:, c].copy()
            col[:n] = v
            self.c += 1
            self.cla.update(c, col)
            if self.k > 0:
                self._toggle(False)
        else:
            # still spend a round on column c so c moves at most one per round,
            # which is what the band schedule predicts
            self.cla.query_row(c)
            self.c += 1
        return self.n - self.k

    def rank(self) -> int:
        return self.n - self.k


def online_rank(columns: Iterable, n: int, seed: int = 0, horizon: int | None = None,
                ring=None) -> list[int]:
    r = OnlineRank(n, seed, horizon, ring)
    return [r.add_column(col) for col in columns]


def online_bipartite_matching(neighborhoods: Iterable[Iterable[int]], n: int, seed: int = 0,
                              horizon: int | None = None, ring=None) -> list[int]:
    """Maximum matching size after each right node arrives with its left neighbours."""
    r = OnlineRank(n, seed, horizon, ring)
    rng = np.random.default_rng(seed + 0x5EED)
    out = []
    for nbrs in neighborhoods:
        col = np.zeros(n, dtype=np.int64)
        nb = sorted(set(int(x) for x in nbrs))
        if nb:
            col[nb] = r.ring.random(rng, (len(nb),), nonzero=True)
        out.append(r.add_column(col))
    return out
