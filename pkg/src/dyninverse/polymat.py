"""Dynamic inverse of I - X*A over truncated polynomials, and its uses.

The inverse of I - X*A modulo X^m is sum_{k<m} X^k A^k, so entry (i, j)
carries weighted walk counts by length. That gives a division-free
determinant and short-distance queries.
"""
from __future__ import annotations

import heapq
import math

import numpy as np

from .algebra import DetTracker
from .dyninv import ElementInverse, SubmatrixMirror
from .errors import Unreachable
from .field import PolyRing, PrimeField
from .matcore import default_ring


def unipotent_inverse(M: np.ndarray, ring: PolyRing) -> np.ndarray:
    """Inverse of ``I - X*N`` (raises NotUnipotent for any other form)."""
    return ring.unipotent_inverse(M)


def _embed(A: np.ndarray, ring: PolyRing) -> np.ndarray:
    """I - X*A as a polynomial matrix."""
    n = A.shape[0]
    out = ring.eye(n)
    if ring.m > 1:
        out[:, :, 1] = (-np.asarray(A, dtype=np.int64)) % ring.p
    return out


class PolyInverse:
    """Truncated inverse of ``I - X*A`` under entry updates of ``A``."""

    def __init__(self, A: np.ndarray | int, m: int, field: PrimeField | None = None,
                 k1: int | None = None, k2: int | None = None):
        field = field or default_ring()
        self.ring = PolyRing(field, m)
        if isinstance(A, (int, np.integer)):
            A = np.zeros((int(A), int(A)), dtype=np.int64)
        self.A = np.array(A, dtype=np.int64) % field.p
        self.n = self.A.shape[0]
        self.m = m
        big = _embed(self.A, self.ring)
        self.inv = ElementInverse(big, k1, k2, self.ring, A0_inv=self.ring.unipotent_inverse(big))

    def _entry(self, i: int, j: int, a: int) -> np.ndarray:
        e = self.ring.zero()
        e[0] = 1 if i == j else 0
        if self.m > 1:
            e[1] = (-int(a)) % self.ring.p
        return e

    def update(self, i: int, j: int, a: int) -> None:
        self.inv.update([(i, j, self._entry(i, j, a))])
        self.A[i, j] = int(a) % self.ring.p

    def update_many(self, changes) -> None:
        self.inv.update([(i, j, self._entry(i, j, a)) for i, j, a in changes])
        for i, j, a in changes:
            self.A[i, j] = int(a) % self.ring.p

    def query(self, I, J) -> np.ndarray:
        return self.inv.query(I, J)

    def entry(self, i: int, j: int) -> np.ndarray:
        """Coefficients (length m) of entry (i, j) of the inverse."""
        return self.inv.query([i], [j])[0, 0]


def pi_update(s: PolyInverse, i: int, j: int, a: int) -> None:
    s.update(i, j, a)


def pi_query(s: PolyInverse, i: int, j: int) -> np.ndarray:
    return s.entry(i, j)


class DivisionFreeDet:
    """det(A) for any A, read off det(I - X(I - A)) modulo X^(n+1) at X = 1."""

    def __init__(self, A: np.ndarray, field: PrimeField | None = None):
        self.field = field or default_ring()
        A = np.array(A, dtype=np.int64) % self.field.p
        self.n = n = A.shape[0]
        self.ring = PolyRing(self.field, n + 1)
        self.A = A.copy()
        big = self.ring.eye(n)
        big[:, :, 1] = (A - np.eye(n, dtype=np.int64)) % self.field.p
        self.tracker = DetTracker(big, "element", self.ring)

    def update(self, i: int, j: int, v: int) -> int:
        p = self.field.p
        e = self.ring.zero()
        e[0] = 1 if i == j else 0
        e[1] = (int(v) - (1 if i == j else 0)) % p
        self.tracker.update([(i, j, e)])
        self.A[i, j] = int(v) % p
        return self.det()

    def det(self) -> int:
        return int(np.sum(self.tracker.det, dtype=object) % self.field.p)


def divfree_det(A: np.ndarray, field: PrimeField | None = None) -> DivisionFreeDet:
    return DivisionFreeDet(A, field)


def _lowest_degree(coeffs: np.ndarray) -> int | None:
    nz = np.flatnonzero(coeffs)
    return int(nz[0]) if nz.size else None


class DistanceOracle:
    """s-t distances in an unweighted digraph under edge insertions/deletions.

    Distances below ``m`` are the lowest nonzero degree of the inverse
    entry; longer ones go through a random hitting set ``H`` whose block
    of the inverse is mirrored explicitly.
    """

    def __init__(self, n: int, mu: float = 0.5, seed: int = 0, s: int = 0, t: int | None = None,
                 field: PrimeField | None = None, c: float = 4.0):
        self.field = field or default_ring()
        self.n = n
        self.mu = mu
        self.m = max(2, math.ceil(n ** mu))
        self.rng = np.random.default_rng(seed)
        size = n if n < 2 else min(n, math.ceil(c * n * math.log(n) / self.m))
        self.H = np.sort(self.rng.choice(n, size, replace=False)) if size else np.zeros(0, dtype=np.int64)
        self.pi = PolyInverse(n, self.m, self.field)
        self.mirror = SubmatrixMirror(self.pi.inv, self.H)
        self.edges: set[tuple[int, int]] = set()
        self.s, self.t = s, (n - 1 if t is None else t)

    def _set(self, u: int, v: int, a: int) -> None:
        self.mirror.update((u, v, self.pi._entry(u, v, a)))
        self.pi.A[u, v] = a

    def add_edge(self, u: int, v: int) -> None:
        if u == v or (u, v) in self.edges:
            return
        self.edges.add((u, v))
        self._set(u, v, int(self.field.random(self.rng, (), nonzero=True)))

    def remove_edge(self, u: int, v: int) -> None:
        if (u, v) not in self.edges:
            return
        self.edges.discard((u, v))
        self._set(u, v, 0)

    def short(self, u: int, v: int) -> int | None:
        return _lowest_degree(self.pi.entry(u, v))

    def query(self, s: int | None = None, t: int | None = None) -> int:
        s = self.s if s is None else s
        t = self.t if t is None else t
        if s == t:
            return 0
        H = self.H.tolist()
        nodes = sorted(set(H) | {s, t})
        idx = {v: k for k, v in enumerate(nodes)}
        from_s = self.pi.query([s], nodes)[0]
        to_t = self.pi.query(nodes, [t])[:, 0]
        hpos = {h: k for k, h in enumerate(H)}
        best = {s: 0}
        heap = [(0, s)]
        done = set()
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            if u == t:
                return d
            for v in nodes:
                if v == u or v in done:
                    continue
                if u == s:
                    w = _lowest_degree(from_s[idx[v]])
                elif v == t:
                    w = _lowest_degree(to_t[idx[u]])
                elif u in hpos and v in hpos:
                    w = _lowest_degree(self.mirror.block[hpos[u], hpos[v]])
                else:
                    w = None
                if w is None:
                    continue
                if d + w < best.get(v, math.inf):
                    best[v] = d + w
                    heapq.heappush(heap, (d + w, v))
        raise Unreachable(f"no path from {s} to {t}")


def dist_update(d: DistanceOracle, u: int, v: int, present: bool) -> None:
    if present:
        d.add_edge(u, v)
    else:
        d.remove_edge(u, v)


def dist_query(d: DistanceOracle, s: int | None = None, t: int | None = None) -> int:
    return d.query(s, t)
