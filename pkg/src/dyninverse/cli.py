"""Command line: fuzz verification, update streams, benchmarks, exponent tuning."""
from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .dyninv import ColumnInverse, ElementInverse, SingularSafe
from .errors import FAIL, Singular, Unreachable, UnsupportedUpdate
from .field import DEFAULT_PRIME, PrimeField
from .graphs import BipartiteMatching, CycleDetector, DagPathCount, GeneralMatching, Reach, SpanningTrees
from .lookahead import CombinedLookAhead, OnlineRank, slack_schedule
from .polymat import DistanceOracle
from .suites import SUITES, run_suite

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- exponent tuning ---------------------------------------------------

# Best known upper bounds on omega(1, 1, k); the value at k = 1 is omega.
CURRENT_TABLE = [
    (0.0, 2.0), (0.31389, 2.0), (0.32, 2.000064), (0.33, 2.000448), (0.34, 2.001118),
    (0.35, 2.001957), (0.40, 2.010314), (0.45, 2.024801), (0.50, 2.042994),
    (0.527661, 2.055322), (0.55, 2.066488), (0.60, 2.092699), (0.65, 2.121265),
    (0.70, 2.153543), (0.75, 2.187543), (0.80, 2.222246), (0.85, 2.261223),
    (0.90, 2.300162), (0.95, 2.339164), (1.00, 2.3728639), (1.10, 2.456151),
    (1.20, 2.539392), (1.30, 2.624703), (1.40, 2.711707), (1.50, 2.800116),
    (1.75, 3.025906), (2.00, 3.256689),
]
OMEGA2_TABLE = [(0.0, 2.0), (1.0, 2.0), (2.0, 3.0)]
OMEGA3_TABLE = [(0.0, 2.0), (1.0, 3.0), (2.0, 4.0)]
PRESETS = {"current": CURRENT_TABLE, "omega2": OMEGA2_TABLE, "omega3": OMEGA3_TABLE}


class OmegaTable:
    """omega(1, 1, k) by linear interpolation; slope 1 past the last key."""

    def __init__(self, pairs: Sequence[tuple[float, float]]):
        pairs = sorted((float(k), float(w)) for k, w in pairs)
        ks = [k for k, _ in pairs]
        ws = [w for _, w in pairs]
        if len(pairs) < 2 or ks[0] != 0.0 or ks[-1] > 2.0 or len(set(ks)) != len(ks):
            raise ValueError("table needs distinct keys in [0, 2] starting at 0")
        if 1.0 not in ks:
            raise ValueError("table needs an entry at k = 1")
        if ws[0] < 2.0 or any(b < a for a, b in zip(ws, ws[1:])):
            raise ValueError("values must start at >= 2 and be nondecreasing")
        self.ks = np.array(ks)
        self.ws = np.array(ws)

    @classmethod
    def parse(cls, text: str) -> "OmegaTable":
        pairs = []
        for no, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ValueError(f"line {no}: expected 'k omega'")
            try:
                pairs.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ValueError(f"line {no}: not a number") from None
        return cls(pairs)

    @property
    def omega(self) -> float:
        return float(self.square(1.0))

    def square(self, k):
        """omega(1, 1, k)."""
        k = np.asarray(k, dtype=float)
        last = self.ks[-1]
        return np.where(k <= last, np.interp(k, self.ks, self.ws), self.ws[-1] + (k - last))

    def rect(self, b, c):
        """omega(1, b, c) for 0 <= b, c <= 1, from the table by tiling.

        With lo <= hi, either split the long side into hi-sized pieces,
        or split hi into lo-sized pieces.
        """
        b = np.asarray(b, dtype=float)
        c = np.asarray(c, dtype=float)
        lo, hi = np.minimum(b, c), np.maximum(b, c)
        safe_hi = np.where(hi > 0, hi, 1.0)
        safe_lo = np.where(lo > 0, lo, 1.0)
        by_hi = (1 - hi) + hi * self.square(lo / safe_hi)
        by_lo = (hi - lo) + lo * self.square(1 / safe_lo)
        out = np.where(lo > 0, np.minimum(by_hi, by_lo), by_hi)
        return np.where(hi > 0, out, 1.0)

    def __call__(self, a: float, b: float, c: float) -> float:
        """omega(a, b, c) = M * omega(1, .../M) where M is the largest dimension."""
        dims = sorted((a, b, c))
        m = dims[-1]
        if m <= 0:
            return 0.0
        return float(m * self.rect(dims[0] / m, dims[1] / m))


@dataclass
class Balanced:
    column_eps: float
    column_exponent: float
    element_eps1: float
    element_eps2: float
    element_exponent: float


def column_cost(t: OmegaTable, e):
    return np.maximum(1 + e, t.square(e) - e)


def element_cost(t: OmegaTable, e1, e2):
    return np.maximum.reduce([e1 + e2, t.rect(e1, e2) - e1, t.square(e2) - e2])


def _refine_1d(f, lo=0.0, hi=1.0):
    step = 1e-3
    xs = np.arange(lo, hi + step / 2, step)
    x = float(xs[np.argmin(f(xs))])
    while step > 1e-4 * 1.0001:
        step /= 10
        xs = np.clip(np.arange(x - 10 * step, x + 10.5 * step, step), lo, hi)
        x = float(xs[np.argmin(f(xs))])
    return x, float(f(np.array(x)))


def _refine_2d(f, lo=0.0, hi=1.0):
    step = 1e-2
    g = np.arange(lo, hi + step / 2, step)
    X, Y = np.meshgrid(g, g, indexing="ij")
    v = f(X, Y)
    i, j = np.unravel_index(np.argmin(v), v.shape)
    x, y = float(X[i, j]), float(Y[i, j])
    while step > 1e-4 * 1.0001:
        step /= 10
        gx = np.clip(np.arange(x - 10 * step, x + 10.5 * step, step), lo, hi)
        gy = np.clip(np.arange(y - 10 * step, y + 10.5 * step, step), lo, hi)
        X, Y = np.meshgrid(gx, gy, indexing="ij")
        v = f(X, Y)
        i, j = np.unravel_index(np.argmin(v), v.shape)
        x, y = float(X[i, j]), float(Y[i, j])
    return x, y, float(f(np.array(x), np.array(y)))


def tune(table: OmegaTable) -> Balanced:
    e, ce = _refine_1d(lambda x: column_cost(table, x))
    e1, e2, ee = _refine_2d(lambda x, y: element_cost(table, x, y))
    return Balanced(e, ce, e1, e2, ee)


def load_table(spec: str) -> OmegaTable:
    if spec in PRESETS:
        return OmegaTable(PRESETS[spec])
    with open(spec) as fh:
        return OmegaTable.parse(fh.read())


def cmd_tune(table_spec: str = "current", out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        table = load_table(table_spec)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    b = tune(table)
    print(f"omega: {table.omega:.6f}", file=out)
    print(f"column: eps={b.column_eps:.4f} exponent={b.column_exponent:.4f}", file=out)
    print(f"element: eps1={b.element_eps1:.4f} eps2={b.element_eps2:.4f} exponent={b.element_exponent:.4f}",
          file=out)
    return EXIT_OK


# -- verification ------------------------------------------------------

def cmd_verify(suite: str, n: int, ops: int, seed: int, p: int = DEFAULT_PRIME,
               out: TextIO | None = None) -> int:
    out = out or sys.stdout
    if suite not in SUITES:
        print(f"error: unknown suite {suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_USAGE
    if n < 1 or ops < 0:
        print("error: need n >= 1 and ops >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        PrimeField(p)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep = run_suite(suite, n, ops, seed, p)
    print(rep.summary(), file=out)
    if rep.ok:
        return EXIT_OK
    print("first mismatch:", file=out)
    for line in rep.first or []:
        print(f"  {line}", file=out)
    return EXIT_MISMATCH


# -- streams -----------------------------------------------------------

MATRIX_CMDS = {"set": 3, "setcol": None, "query": 2, "queryrow": 1, "det": 0, "rank": 0}
GRAPH_CMDS = {"addedge": 2, "deledge": 2, "nodeon": 1, "nodeoff": 1, "reach": 2, "match": 0,
              "cycle": 0, "paths": 2, "dist": 2, "trees": 0}
DIRECTED_ONLY = {"cycle", "paths"}
UNDIRECTED_ONLY = {"trees"}


@dataclass
class Command:
    line: int
    name: str
    args: list[int]


def _ints(words: list[str], line: int) -> list[int]:
    try:
        return [int(w) for w in words]
    except ValueError:
        raise UsageError(f"line {line}: expected integers, got {' '.join(words)!r}") from None


def parse_stream(text: str):
    """Header dict and command list; raises UsageError with a line number."""
    lines = text.splitlines()
    body = [(no, ln.split("#", 1)[0].split()) for no, ln in enumerate(lines, 1)]
    body = [(no, w) for no, w in body if w]
    if not body:
        raise UsageError("line 1: missing header")
    no, head = body[0]
    header: dict = {}
    if head[0] == "matrix":
        if len(head) != 4:
            raise UsageError(f"line {no}: header is 'matrix <n> <p> <seed>'")
        n, p, seed = _ints(head[1:], no)
        header = {"kind": "matrix", "n": n, "p": p, "seed": seed}
        table = MATRIX_CMDS
    elif head[0] == "graph":
        if len(head) not in (3, 5) or head[2] not in ("directed", "undirected"):
            raise UsageError(f"line {no}: header is 'graph <n> directed|undirected [<p> <seed>]'")
        n = _ints(head[1:2], no)[0]
        p, seed = _ints(head[3:5], no) if len(head) == 5 else (DEFAULT_PRIME, 0)
        header = {"kind": "graph", "n": n, "directed": head[2] == "directed", "p": p, "seed": seed}
        table = GRAPH_CMDS
    else:
        raise UsageError(f"line {no}: unknown header {head[0]!r}")
    if n < 1:
        raise UsageError(f"line {no}: n must be positive")
    try:
        PrimeField(header["p"])
    except ValueError as exc:
        raise UsageError(f"line {no}: {exc}") from None
    cmds = []
    for no, words in body[1:]:
        name, rest = words[0], words[1:]
        if name not in table:
            raise UsageError(f"line {no}: unknown command {name!r}")
        want = n + 1 if name == "setcol" else table[name]
        if len(rest) != want:
            raise UsageError(f"line {no}: {name} takes {want} arguments")
        args = _ints(rest, no)
        idx = args[:1] if name == "setcol" else (args[:2] if name == "set" else args)
        if any(not 0 <= a < n for a in idx):
            raise UsageError(f"line {no}: index out of range")
        if header["kind"] == "graph":
            if name in DIRECTED_ONLY and not header["directed"]:
                raise UsageError(f"line {no}: {name} needs a directed graph")
            if name in UNDIRECTED_ONLY and header["directed"]:
                raise UsageError(f"line {no}: {name} needs an undirected graph")
            if name in ("addedge", "deledge") and args[0] == args[1]:
                raise UsageError(f"line {no}: self-loops are not allowed")
        cmds.append(Command(no, name, args))
    return header, cmds


def _fmt(x) -> str:
    if x is FAIL:
        return "Fail"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, np.ndarray):
        return " ".join(str(int(v)) for v in x)
    return str(int(x))


class MatrixSession:
    """Starts at the identity; queries on a singular matrix print Fail."""

    def __init__(self, n: int, p: int, seed: int):
        self.F = PrimeField(p)
        self.n = n
        self.ss = SingularSafe(self.F.eye(n), seed=seed, ring=self.F)

    def run(self, c: Command):
        a = c.args
        if c.name == "set":
            self.ss.update((a[0], a[1], a[2] % self.F.p))
        elif c.name == "setcol":
            self.ss.update_column(a[0], np.array(a[1:], dtype=object) % self.F.p)
        elif c.name == "query":
            return self.ss.query(a[0], a[1])
        elif c.name == "queryrow":
            return self.ss.row(a[0])
        elif c.name == "det":
            return self.ss.det()
        elif c.name == "rank":
            return self.ss.rank()
        return None


class GraphSession:
    """Each reducer is built on first use from the current edge set and then
    kept in sync. Switched-off nodes hide their incident edges."""

    def __init__(self, n: int, directed: bool, p: int, seed: int):
        self.n, self.directed, self.seed = n, directed, seed
        self.F = PrimeField(p)
        self.edges: set[tuple[int, int]] = set()
        self.on = [True] * n
        self.reducers: dict[str, object] = {}

    def _key(self, u, v):
        return (u, v) if self.directed else (min(u, v), max(u, v))

    def _visible(self, e) -> bool:
        return self.on[e[0]] and self.on[e[1]]

    def _arcs(self, e):
        """Directed arcs a reducer on directed edges must see for edge e."""
        return [e] if self.directed else [e, (e[1], e[0])]

    def _make(self, name: str):
        F, n, s = self.F, self.n, self.seed
        if name == "reach":
            r = Reach(n, s, F)
        elif name == "match":
            r = GeneralMatching(n, s + 1, F) if not self.directed else BipartiteMatching(n, s + 1, F)
        elif name == "cycle":
            r = CycleDetector(n, s + 2, F)
        elif name == "paths":
            r = DagPathCount(n, F)
        elif name == "dist":
            r = DistanceOracle(n, 0.5, s + 3, field=F)
        elif name == "trees":
            r = SpanningTrees(n, strict=False, field=F)
        else:
            raise AssertionError(name)
        for e in sorted(self.edges):
            if self._visible(e):
                self._push(name, r, e, True)
        return r

    def _push(self, name, r, e, present: bool):
        u, v = e
        if name in ("reach", "dist"):
            for a, b in self._arcs(e):
                (r.add_edge if present else r.remove_edge)(a, b)
        else:
            (r.add_edge if present else r.remove_edge)(u, v)

    def _broadcast(self, e, present: bool):
        for name, r in list(self.reducers.items()):
            try:
                self._push(name, r, e, present)
            except Singular:
                # e.g. a cycle under the acyclic path counter; rebuilt on next query
                del self.reducers[name]

    def _get(self, name: str):
        if name not in self.reducers:
            self.reducers[name] = self._make(name)
        return self.reducers[name]

    def run(self, c: Command):
        a = c.args
        if c.name in ("addedge", "deledge"):
            e = self._key(a[0], a[1])
            present = c.name == "addedge"
            if (e in self.edges) == present:
                return None
            (self.edges.add if present else self.edges.discard)(e)
            if self._visible(e):
                self._broadcast(e, present)
            return None
        if c.name in ("nodeon", "nodeoff"):
            v, want = a[0], c.name == "nodeon"
            if self.on[v] == want:
                return None
            touched = sorted(e for e in self.edges if v in e)
            if not want:
                for e in touched:
                    if self._visible(e):
                        self._broadcast(e, False)
            self.on[v] = want
            if want:
                for e in touched:
                    if self._visible(e):
                        self._broadcast(e, True)
            return None
        if c.name == "paths" and self._get("cycle").has_cycle():
            return "cyclic"  # counts are only defined on acyclic graphs
        r = self._get(c.name)
        if c.name == "reach":
            return r.reach(a[0], a[1])
        if c.name == "match":
            return r.matching_size() if not self.directed else r.size()
        if c.name == "cycle":
            return r.has_cycle()
        if c.name == "paths":
            return r.count(a[0], a[1])
        if c.name == "dist":
            try:
                return r.query(a[0], a[1])
            except Unreachable:
                return "unreachable"
        if c.name == "trees":
            return r.count()
        raise AssertionError(c.name)


def cmd_stream(path: str, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        with open(path) as fh:
            text = fh.read()
        header, cmds = parse_stream(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if header["kind"] == "matrix":
        sess = MatrixSession(header["n"], header["p"], header["seed"])
    else:
        sess = GraphSession(header["n"], header["directed"], header["p"], header["seed"])
    for c in cmds:
        try:
            res = sess.run(c)
        except Singular:
            res = "Singular"
        except UnsupportedUpdate as exc:
            print(f"error: line {c.line}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if res is None:
            continue
        print(res if isinstance(res, str) else _fmt(res), file=out)
    return EXIT_OK


# -- benchmarks --------------------------------------------------------

BENCH_ALGOS = ("element", "column", "lookahead", "online-rank", "naive-recompute")
WARMUP, REPEATS = 3, 5


def _bench_ops(algo: str, n: int, ops: int, seed: int, F: PrimeField):
    """A fresh structure plus a list of callables, one per timed op."""
    rng = np.random.default_rng(seed)
    total = WARMUP + REPEATS * ops
    while True:
        A = F.random(rng, (n, n))
        if F.rank(A) == n:
            break
    if algo == "element":
        s = ElementInverse(A, ring=F)
        plan = [(int(rng.integers(n)), int(rng.integers(n)), int(F.random(rng, (), nonzero=True)))
                for _ in range(total)]

        def op(k):
            i, j, v = plan[k]
            s.update([(i, j, v)])
            s.entry(j, i)
        return s, op
    if algo == "column":
        s = ColumnInverse(A, ring=F)
        plan = [(int(rng.integers(n)), F.random(rng, (n,)), int(rng.integers(n))) for _ in range(total)]

        def op(k):
            j, col, i = plan[k]
            s.update(j, col)
            s.query_row(i)
        return s, op
    if algo == "lookahead":
        horizon = 2 ** max(1, math.ceil(math.log2(max(2.0, math.sqrt(n)))))
        pos = [int(x) for x in rng.integers(n, size=total + horizon + 2)]
        s = CombinedLookAhead(slack_schedule(pos, n, horizon), A, horizon=horizon, ring=F)
        cols = [F.random(rng, (n,)) for _ in range(total)]

        def op(k):
            s.update(pos[k], cols[k])
        return s, op
    if algo == "online-rank":
        if total > n:
            raise UsageError(f"online-rank reveals at most n columns; need n >= {total}")
        s = OnlineRank(n, seed, ring=F)
        cols = [(rng.random(n) < 0.5).astype(np.int64) for _ in range(total)]

        def op(k):
            s.add_column(cols[k])
        return s, op
    if algo == "naive-recompute":
        s = {"A": A.copy(), "resets": 0}
        plan = [(int(rng.integers(n)), int(rng.integers(n)), int(F.random(rng, (), nonzero=True)))
                for _ in range(total)]

        def op(k):
            i, j, v = plan[k]
            s["A"][i, j] = v
            F.gaussian_inverse(s["A"])
            s["resets"] += 1
        return s, op
    raise UsageError(f"unknown algorithm {algo!r}")


def _resets(s) -> int:
    if isinstance(s, dict):
        return s["resets"]
    if isinstance(s, CombinedLookAhead):
        return s.outer.resets
    if isinstance(s, OnlineRank):
        return s.cla.outer.resets
    return int(getattr(s, "resets", 0))


def bench_one(algo: str, n: int, ops: int, seed: int, p: int = DEFAULT_PRIME) -> dict:
    F = PrimeField(p)
    s, op = _bench_ops(algo, n, ops, seed, F)
    for k in range(WARMUP):
        op(k)
    k = WARMUP
    medians, samples = [], []
    for _ in range(REPEATS):
        times = []
        for _ in range(ops):
            t0 = time.perf_counter_ns()
            op(k)
            times.append((time.perf_counter_ns() - t0) / 1000)
            k += 1
        medians.append(float(np.median(times)))
        samples.extend(times)
    return {"algo": algo, "n": n, "ops": ops,
            "median_us_per_op": round(float(np.median(medians)), 3),
            "p95_us_per_op": round(float(np.percentile(samples, 95)), 3),
            "resets": _resets(s)}


CSV_FIELDS = ["algo", "n", "ops", "median_us_per_op", "p95_us_per_op", "resets"]


def cmd_bench(algos: Sequence[str], sizes: Sequence[int], seed: int, csv_path: str | None,
              ops: int = 8, p: int = DEFAULT_PRIME, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    for a in algos:
        if a not in BENCH_ALGOS:
            print(f"error: unknown algorithm {a!r}; choose from {', '.join(BENCH_ALGOS)}", file=sys.stderr)
            return EXIT_USAGE
    rows = []
    try:
        for n in sizes:
            for a in algos:
                rows.append(bench_one(a, n, ops, seed, p))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    fh = open(csv_path, "w", newline="") if csv_path else out
    try:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        w.writeheader()
        w.writerows(rows)
    finally:
        if csv_path:
            fh.close()
    return EXIT_OK


# -- entry point -------------------------------------------------------

def _sizes(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError("sizes must be comma-separated integers") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dyninverse", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="fuzz a structure against its oracle")
    v.add_argument("suite", help="one of: " + ", ".join(SUITES))
    v.add_argument("--n", type=int, default=16)
    v.add_argument("--ops", type=int, default=32)
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--p", type=int, default=DEFAULT_PRIME)

    s = sub.add_parser("stream", help="run an update/query stream file")
    s.add_argument("path")

    b = sub.add_parser("bench", help="time per-op cost and write CSV")
    b.add_argument("algos", nargs="+", help="any of: " + ", ".join(BENCH_ALGOS))
    b.add_argument("--sizes", type=_sizes, default=[64])
    b.add_argument("--ops", type=int, default=8)
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--p", type=int, default=DEFAULT_PRIME)
    b.add_argument("--csv", default=None, help="output path (stdout if omitted)")

    t = sub.add_parser("tune", help="balance the update exponents for an omega table")
    t.add_argument("--table", default="current",
                   help="'current', 'omega2', 'omega3' or a file of 'k omega(1,1,k)' lines")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "verify":
        return cmd_verify(args.suite, args.n, args.ops, args.seed, args.p)
    if args.command == "stream":
        return cmd_stream(args.path)
    if args.command == "bench":
        return cmd_bench(args.algos, args.sizes, args.seed, args.csv, args.ops, args.p)
    if args.command == "tune":
        return cmd_tune(args.table)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
