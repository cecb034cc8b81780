"""Dynamic graph problems reduced to dynamic inverse, determinant and rank.

Every reducer draws its random edge values from its own seeded generator
when an edge appears and keeps them until the edge is deleted.
Randomized answers can only err towards "no".
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .algebra import DetTracker, ProductChain
from .dyninv import ElementInverse, SingularSafe
from .errors import Singular, UnsupportedUpdate
from .field import PolyRing, PrimeField
from .matcore import default_ring


class _Graph:
    def __init__(self, n: int, directed: bool, seed: int, field: PrimeField | None):
        self.n = n
        self.directed = directed
        self.field = field or default_ring()
        self.rng = np.random.default_rng(seed)
        self.edges: set[tuple[int, int]] = set()

    def _key(self, u: int, v: int) -> tuple[int, int]:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise IndexError("node out of range")
        if u == v:
            raise ValueError("self-loops are not allowed")
        return (u, v) if self.directed else (min(u, v), max(u, v))

    def _value(self) -> int:
        return int(self.field.random(self.rng, (), nonzero=True))

    def add_edge(self, u: int, v: int) -> None:
        key = self._key(u, v)
        if key in self.edges:
            return
        self._set_edge(key, True)
        self.edges.add(key)

    def remove_edge(self, u: int, v: int) -> None:
        key = self._key(u, v)
        if key not in self.edges:
            return
        self._set_edge(key, False)
        self.edges.discard(key)

    def _set_edge(self, key: tuple[int, int], present: bool) -> None:
        raise NotImplementedError


class Reach(_Graph):
    """Reachability from the inverse of I - A with random edge values."""

    def __init__(self, n: int, seed: int = 0, field: PrimeField | None = None):
        super().__init__(n, True, seed, field)
        self.inv = ElementInverse(self.field.eye(n), ring=self.field)

    def _set_edge(self, key, present):
        u, v = key
        while True:
            val = self.field.ssub(0, self._value()) if present else 0
            try:
                self.inv.update([(u, v, val)])
                return
            except Singular:
                if not present:
                    raise
                # the sampled value hit a root of det(I - A); draw again

    def set_incoming(self, v: int, sources: Iterable[int]) -> None:
        """Replace all edges into ``v`` at once (a column update)."""
        sources = {int(s) for s in sources}
        if v in sources:
            raise ValueError("self-loops are not allowed")
        for _ in range(64):
            vals = {s: self.field.ssub(0, self._value()) for s in sources}
            changes = [(u, v, vals.get(u, 0)) for u in range(self.n) if u != v]
            try:
                self.inv.update(changes)
                break
            except Singular:
                continue
        else:
            raise Singular("could not realise the node update")
        self.edges = {e for e in self.edges if e[1] != v} | {(s, v) for s in sources}

    def set_outgoing(self, v: int, targets: Iterable[int]) -> None:
        raise UnsupportedUpdate("reachability supports edge and incoming-node updates only")

    def reach(self, s: int, t: int) -> bool:
        return s == t or int(self.inv.entry(s, t)) != 0

    def reachable_from(self, s: int) -> set[int]:
        row = self.inv.row(s)
        return {int(v) for v in np.flatnonzero(row)} | {s}


class StrongConnectivity:
    """Node 0 reaches everything in the graph and in its reverse."""

    def __init__(self, n: int, seed: int = 0, field: PrimeField | None = None):
        self.n = n
        self.fwd = Reach(n, seed, field)
        self.rev = Reach(n, seed + 1, field)

    def add_edge(self, u: int, v: int) -> None:
        self.fwd.add_edge(u, v)
        self.rev.add_edge(v, u)

    def remove_edge(self, u: int, v: int) -> None:
        self.fwd.remove_edge(u, v)
        self.rev.remove_edge(v, u)

    def strongly_connected(self) -> bool:
        if self.n <= 1:
            return True
        return len(self.fwd.reachable_from(0)) == self.n and len(self.rev.reachable_from(0)) == self.n


def strongly_connected(g: StrongConnectivity) -> bool:
    return g.strongly_connected()


class DagPathCount(_Graph):
    """Number of u-v paths (mod p) in a graph promised to stay acyclic."""

    def __init__(self, n: int, field: PrimeField | None = None):
        super().__init__(n, True, 0, field)
        self.inv = ElementInverse(self.field.eye(n), ring=self.field)

    def _set_edge(self, key, present):
        u, v = key
        self.inv.update([(u, v, self.field.ssub(0, 1) if present else 0)])

    def count(self, u: int, v: int) -> int:
        return int(self.inv.entry(u, v))


def dag_path_count(g: DagPathCount, u: int, v: int) -> int:
    return g.count(u, v)


class CycleDetector(_Graph):
    """det(I + A) is 1 for a DAG and a nonzero polynomial otherwise."""

    def __init__(self, n: int, seed: int = 0, field: PrimeField | None = None):
        super().__init__(n, True, seed, field)
        self.ss = SingularSafe(self.field.eye(n), seed=seed + 7, ring=self.field)

    def _set_edge(self, key, present):
        u, v = key
        self.ss.update((u, v, self._value() if present else 0))

    def has_cycle(self) -> bool:
        return self.ss.det() != 1


def has_cycle(g: CycleDetector) -> bool:
    return g.has_cycle()


def colorings_needed(k: int, delta: float) -> int:
    """Colorings so that a fixed k-cycle (or k-node path) survives one of them
    with probability at least 1 - delta.

    A coloring keeps u->v only when color(v) = color(u) + 1 mod k, so a fixed
    cycle survives with probability k^(1-k).
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return math.ceil(k ** (k - 1) * math.log(1 / delta))


class _ColorCoded(_Graph):
    def __init__(self, n: int, k: int, delta: float, seed: int, field: PrimeField | None, m: int,
                 colorings: int | None):
        super().__init__(n, True, seed, field)
        if not 2 <= k <= 8:
            raise ValueError("k must be between 2 and 8")
        self.k = k
        self.delta = delta
        self.N = colorings_needed(k, delta) if colorings is None else colorings
        self.ring = PolyRing(self.field, m)
        self.colors = self.rng.integers(0, k, size=(self.N, n))
        eye = self.ring.eye(n)
        self.structs = [self._make(eye) for _ in range(self.N)]

    def _make(self, eye):
        raise NotImplementedError

    def _kept(self, c: int, u: int, v: int) -> bool:
        col = self.colors[c]
        return (col[u] + 1) % self.k == col[v]

    def _entry(self, val: int) -> np.ndarray:
        e = self.ring.zero()
        e[1] = (-val) % self.field.p
        return e

    def _set_edge(self, key, present):
        u, v = key
        val = self._value() if present else 0
        for c in range(self.N):
            if self._kept(c, u, v):
                self._apply(c, u, v, self._entry(val))

    def _apply(self, c, u, v, entry):
        raise NotImplementedError


class KCycle(_ColorCoded):
    """Is there a simple directed cycle of length exactly k?

    Per coloring, the coefficient of X^k in det(I - X*A_c) sums over the
    k-cycles that survive the coloring.
    """

    def __init__(self, n: int, k: int, delta: float = 0.01, seed: int = 0,
                 field: PrimeField | None = None, colorings: int | None = None):
        super().__init__(n, k, delta, seed, field, k + 1, colorings)

    def _make(self, eye):
        return DetTracker(eye, "element", self.ring, A_inv=eye.copy(), det=self.ring.one())

    def _apply(self, c, u, v, entry):
        self.structs[c].update([(u, v, entry)])

    def has_k_cycle(self) -> bool:
        return any(int(t.det[self.k]) != 0 for t in self.structs)


class KPath(_ColorCoded):
    """Is there a simple directed path on k nodes (from u to v)?

    Per coloring, the coefficient of X^(k-1) in entry (u, v) of
    (I - X*A_c)^{-1} sums over the surviving walks of k - 1 edges, and a
    surviving walk cannot repeat a node.
    """

    def __init__(self, n: int, k: int, delta: float = 0.01, seed: int = 0,
                 field: PrimeField | None = None, colorings: int | None = None):
        super().__init__(n, k, delta, seed, field, k, colorings)

    def _make(self, eye):
        return ElementInverse(eye, ring=self.ring, A0_inv=eye.copy())

    def _apply(self, c, u, v, entry):
        self.structs[c].update([(u, v, entry)])

    def has_k_path(self, u: int | None = None, v: int | None = None) -> bool:
        rows = np.arange(self.n) if u is None else [u]
        cols = np.arange(self.n) if v is None else [v]
        for s in self.structs:
            if np.any(s.query(rows, cols)[:, :, self.k - 1]):
                return True
        return False


def k_cycle(g: KCycle) -> bool:
    return g.has_k_cycle()


def k_path(g: KPath, u: int | None = None, v: int | None = None) -> bool:
    return g.has_k_path(u, v)


class TriangleSubgraph:
    """Triangles among active nodes of a fixed undirected graph.

    The counter is trace((AD)^3) = 6 * triangles, maintained through the
    product A D A D A.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], active: Iterable[int] = (),
                 field: PrimeField | None = None):
        self.field = field or default_ring()
        self.n = n
        A = np.zeros((n, n), dtype=np.int64)
        for u, v in edges:
            if u != v:
                A[u, v] = A[v, u] = 1
        self.A = A
        self.active = np.zeros(n, dtype=bool)
        D = np.zeros((n, n), dtype=np.int64)
        self.chain = ProductChain([A, D, A, D, A], self.field)
        self.counter = 0
        for v in active:
            self.node_on(v)

    def _closed_walks(self, v: int) -> int:
        return int(self.chain.entry(0, 4, v, v))

    def _toggle(self, v: int, on: bool) -> None:
        if self.active[v] == on:
            return
        w = self._closed_walks(v)
        f = self.field
        self.counter = f.sadd(self.counter, f.smul(3, w)) if on else f.ssub(self.counter, f.smul(3, w))
        val = 1 if on else 0
        self.chain.update([(1, v, v, val), (3, v, v, val)])
        self.active[v] = on

    def node_on(self, v: int) -> None:
        self._toggle(v, True)

    def node_off(self, v: int) -> None:
        self._toggle(v, False)

    def add_edge(self, u: int, v: int) -> None:
        raise UnsupportedUpdate("this model toggles nodes of a fixed graph")

    def has_triangle(self) -> bool:
        return self.counter != 0

    def triangles(self) -> int:
        return self.counter // 6


class TriangleIncoming:
    """Directed triangles under node updates that replace incoming edges.

    The counter is trace(A^3) = 3 * directed triangles.
    """

    def __init__(self, n: int, field: PrimeField | None = None):
        self.field = field or default_ring()
        self.n = n
        Z = np.zeros((n, n), dtype=np.int64)
        self.A = Z.copy()
        self.chain = ProductChain([Z, Z, Z], self.field)
        self.counter = 0

    def set_incoming(self, v: int, sources: Iterable[int]) -> None:
        f = self.field
        new = np.zeros(self.n, dtype=np.int64)
        for s in sources:
            if s != v:
                new[s] = 1
        old_diag = int(self.chain.entry(0, 2, v, v))
        rows = np.flatnonzero(new != self.A[:, v])
        if rows.size == 0:
            return
        self.chain.update([(w, int(r), v, int(new[r])) for w in range(3) for r in rows])
        self.A[:, v] = new
        new_diag = int(self.chain.entry(0, 2, v, v))
        self.counter = f.sadd(self.counter, f.smul(3, f.ssub(new_diag, old_diag)))

    def add_edge(self, u: int, v: int) -> None:
        raise UnsupportedUpdate("this model replaces the incoming edges of a node")

    def has_triangle(self) -> bool:
        return self.counter != 0

    def triangles(self) -> int:
        return self.counter // 3


class TriangleEdge:
    """Triangles under edge updates; counter is trace(A^3).

    That is 6 * triangles for undirected graphs and 3 * triangles for
    directed ones. Only A^2 is maintained: inserting u->v adds
    3 * (A^2)[v, u] to the trace.
    """

    def __init__(self, n: int, directed: bool = False, field: PrimeField | None = None):
        self.field = field or default_ring()
        self.n = n
        self.directed = directed
        Z = np.zeros((n, n), dtype=np.int64)
        self.A = Z.copy()
        self.chain = ProductChain([Z, Z], self.field)
        self.counter = 0

    def _set(self, u: int, v: int, x: int) -> None:
        f = self.field
        d = x - int(self.A[u, v])
        if d == 0:
            return
        sq = int(self.chain.entry(0, 1, v, u))
        self.counter = f.sadd(self.counter, f.smul(3 * d % f.p, sq))
        self.chain.update([(0, u, v, x), (1, u, v, x)])
        self.A[u, v] = x

    def _edge(self, u: int, v: int, x: int) -> None:
        if u == v:
            raise ValueError("self-loops are not allowed")
        self._set(u, v, x)
        if not self.directed:
            self._set(v, u, x)

    def add_edge(self, u: int, v: int) -> None:
        self._edge(u, v, 1)

    def remove_edge(self, u: int, v: int) -> None:
        self._edge(u, v, 0)

    def has_triangle(self) -> bool:
        return self.counter != 0

    def triangles(self) -> int:
        return self.counter // (3 if self.directed else 6)


class BipartiteMatching:
    """Maximum matching size of an n+n bipartite graph: rank of a random
    matrix supported on the edges."""

    def __init__(self, n: int, seed: int = 0, field: PrimeField | None = None):
        self.field = field or default_ring()
        self.n = n
        self.rng = np.random.default_rng(seed)
        self.ss = SingularSafe(n, seed=seed + 11, ring=self.field)
        self.edges: set[tuple[int, int]] = set()

    def _value(self) -> int:
        return int(self.field.random(self.rng, (), nonzero=True))

    def add_edge(self, left: int, right: int) -> None:
        if (left, right) in self.edges:
            return
        self.ss.update((left, right, self._value()))
        self.edges.add((left, right))

    def remove_edge(self, left: int, right: int) -> None:
        if (left, right) not in self.edges:
            return
        self.ss.update((left, right, 0))
        self.edges.discard((left, right))

    def set_right(self, right: int, lefts: Iterable[int]) -> None:
        """Replace the neighbourhood of a right node (a column update)."""
        lefts = sorted(set(int(x) for x in lefts))
        col = np.zeros(self.n, dtype=np.int64)
        for l in lefts:
            col[l] = self._value()
        self.ss.update_column(right, col)
        self.edges = {e for e in self.edges if e[1] != right} | {(l, right) for l in lefts}

    def set_left(self, left: int, rights: Iterable[int]) -> None:
        """Replace the neighbourhood of a left node (a row update)."""
        rights = sorted(set(int(x) for x in rights))
        row = np.zeros(self.n, dtype=np.int64)
        for r in rights:
            row[r] = self._value()
        self.ss.update_row(left, row)
        self.edges = {e for e in self.edges if e[0] != left} | {(left, r) for r in rights}

    def size(self) -> int:
        return self.ss.rank()


def bipartite_matching_size(g: BipartiteMatching) -> int:
    return g.size()


class GeneralMatching(_Graph):
    """Matching size of an undirected graph: half the rank of a random
    Tutte matrix."""

    def __init__(self, n: int, seed: int = 0, field: PrimeField | None = None):
        super().__init__(n, False, seed, field)
        self.ss = SingularSafe(n, seed=seed + 13, ring=self.field)

    def _set_edge(self, key, present):
        u, v = key
        x = self._value() if present else 0
        self.ss.update((u, v, x))
        self.ss.update((v, u, self.field.ssub(0, x)))

    def matching_size(self) -> int:
        return self.ss.rank() // 2

    def perfect_matching(self) -> bool:
        return self.ss.rank() == self.n


def perfect_matching(g: GeneralMatching) -> bool:
    return g.perfect_matching()


def matching_size(g: GeneralMatching) -> int:
    return g.matching_size()


class SpanningTrees(_Graph):
    """Spanning trees of an undirected graph: det of the reduced Laplacian.

    In strict mode the graph must stay connected (a disconnecting update
    raises Singular and is rejected). In tolerant mode the count is 0 while
    disconnected.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), strict: bool = True,
                 field: PrimeField | None = None):
        super().__init__(n, False, 0, field)
        self.strict = strict
        L = np.zeros((n, n), dtype=np.int64)
        for u, v in edges:
            key = self._key(u, v)
            if key in self.edges:
                continue
            self.edges.add(key)
            L[u, u] += 1
            L[v, v] += 1
            L[u, v] -= 1
            L[v, u] -= 1
        self.L = L % self.field.p
        red = self.L[1:, 1:]
        if n <= 1:
            self.tracker = None
        elif strict:
            self.tracker = DetTracker(red, "element", self.field)
        else:
            self.tracker = SingularSafe(red, seed=17, ring=self.field)

    def _set_edge(self, key, present):
        u, v = key
        f = self.field
        s = 1 if present else -1
        L = self.L.copy()
        for a, b, d in ((u, u, s), (v, v, s), (u, v, -s), (v, u, -s)):
            L[a, b] = (L[a, b] + d) % f.p
        changes = [(a - 1, b - 1, int(L[a, b])) for a, b in {(u, u), (v, v), (u, v), (v, u)}
                   if a > 0 and b > 0]
        if self.tracker is not None and changes:
            if self.strict:
                self.tracker.update(changes)
            else:
                for ch in changes:
                    self.tracker.update(ch)
        self.L = L

    def count(self) -> int:
        if self.tracker is None:
            return 1
        if self.strict:
            return int(self.tracker.det)
        return int(self.tracker.det())


def spanning_tree_count(g: SpanningTrees) -> int:
    return g.count()
