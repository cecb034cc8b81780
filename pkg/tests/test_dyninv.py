import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyninverse.dyninv import ColumnInverse, Deamortized, ElementInverse, SingularSafe, SubmatrixMirror
from dyninverse.errors import FAIL, PreconditionViolated, Singular, UnsupportedUpdate
from dyninverse.field import PrimeField
from dyninverse.matcore import default_ring
from oracles import py_det, py_inverse, py_rank, sherman_morrison, to_lists

F = default_ring()
F5 = PrimeField(5)
P = F.p


def random_invertible(rng, n, ring=F):
    while True:
        a = ring.random(rng, (n, n))
        if ring.rank(a) == n:
            return a


def test_element_inverse_examples():
    s = ElementInverse(F.eye(3))
    assert s.query(range(3), range(3)).tolist() == F.eye(3).tolist()
    s = ElementInverse(F5.eye(2), ring=F5)
    s.set(0, 1, 1)
    assert s.query([0, 1], [0, 1]).tolist() == [[1, 4], [0, 1]]
    with pytest.raises(Singular):
        s.set(1, 0, 1)


def test_rejected_update_leaves_state_intact():
    s = ElementInverse(F5.eye(2), ring=F5)
    with pytest.raises(Singular):
        s.set(0, 0, 0)
    assert s.A.tolist() == [[1, 0], [0, 1]]
    assert s.query([0, 1], [0, 1]).tolist() == [[1, 0], [0, 1]]


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 20), st.integers(0, 2**32))
def test_element_inverse_tracks_two_oracles(n, seed):
    """Gaussian elimination and Sherman-Morrison chains must both agree."""
    rng = np.random.default_rng(seed)
    a = random_invertible(rng, n)
    s = ElementInverse(a, k1=2, k2=3)
    sm = py_inverse(a, P)
    for _ in range(3 * n):
        i, j = (int(x) for x in rng.integers(n, size=2))
        v = int(rng.integers(P))
        nxt = sherman_morrison(sm, i, j, (v - int(s.A[i, j])) % P, P)
        if nxt is None:
            with pytest.raises(Singular):
                s.set(i, j, v)
            continue
        s.set(i, j, v)
        sm = nxt
        got = to_lists(s.query(range(n), range(n)))
        assert got == sm
        assert got == py_inverse(s.A, P)


@pytest.mark.parametrize("k1,k2", [(1, 1), (1, 4), (2, 5), (3, 100)])
def test_thresholds_do_not_change_answers(k1, k2):
    rng = np.random.default_rng(7)
    n = 12
    a = random_invertible(rng, n)
    ref = ElementInverse(a)
    s = ElementInverse(a, k1=k1, k2=k2)
    for _ in range(40):
        batch = [(int(rng.integers(n)), int(rng.integers(n)), int(rng.integers(P))) for _ in range(2)]
        try:
            ref.update(batch)
        except Singular:
            with pytest.raises(Singular):
                s.update(batch)
            continue
        s.update(batch)
        I = rng.choice(n, 4, replace=False)
        assert (s.query(I, I) == ref.query(I, I)).all()


def test_batch_last_write_wins():
    s = ElementInverse(F5.eye(2), ring=F5)
    s.update([(0, 1, 3), (0, 1, 1)])
    assert s.A.tolist() == [[1, 1], [0, 1]]


def test_column_inverse_builds_target():
    rng = np.random.default_rng(8)
    n = 10
    m = random_invertible(rng, n)
    s = ColumnInverse(F.eye(n), k1=3)
    cur = F.eye(n)
    for j in range(n):
        cur[:, j] = m[:, j]
        want = py_inverse(cur, P)
        if want is None:
            with pytest.raises(Singular):
                s.update(j, m[:, j])
            cur[:, j] = s.A[:, j]
            continue
        s.update(j, m[:, j])
        for i in range(n):
            assert s.query_row(i).tolist() == want[i]
    assert s.resets >= 1


def test_column_inverse_rejects_repeats():
    s = ColumnInverse(F.eye(3))
    with pytest.raises(ValueError):
        s.update_columns([1, 1], F.zeros(3, 2))


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 14), st.integers(0, 2**32))
def test_submatrix_mirror(n, seed):
    rng = np.random.default_rng(seed)
    a = random_invertible(rng, n)
    H = np.sort(rng.choice(n, int(rng.integers(1, n + 1)), replace=False))
    m = SubmatrixMirror(ElementInverse(a), H)
    for _ in range(2 * n):
        i, j, v = int(rng.integers(n)), int(rng.integers(n)), int(rng.integers(P))
        after = m.ei.A.copy()
        after[i, j] = v
        want = py_inverse(after, P)
        if want is None:
            with pytest.raises(Singular):
                m.update((i, j, v))
            continue
        m.update((i, j, v))
        assert m.block.tolist() == [[want[r][c] for c in H] for r in H]
    h = int(H[0])
    assert m.entry(h, h) == m.block[0, 0]


@pytest.mark.parametrize("mu", [4, 8, 16])
def test_deamortized_agrees_and_bounds_work(mu):
    rng = np.random.default_rng(mu)
    n = 8
    a = random_invertible(rng, n)
    s = Deamortized(a, mu)
    cur = a.copy()
    for _ in range(3 * mu):
        i, j, v = int(rng.integers(n)), int(rng.integers(n)), int(rng.integers(P))
        nxt = cur.copy()
        nxt[i, j] = v
        want = py_inverse(nxt, P)
        if want is None:
            continue
        s.update([(i, j, v)])
        cur = nxt
        assert s.query(range(n), range(n)).tolist() == want
    assert max(s.round_work) <= s.bound
    with pytest.raises(PreconditionViolated):
        s.update([])
    with pytest.raises(ValueError):
        Deamortized(a, 6)


def test_singular_safe_zero_matrix():
    s = SingularSafe(4)
    assert s.rank() == 0
    assert s.query(0, 0) is FAIL
    assert s.row(0) is FAIL
    assert s.det() == 0


def test_singular_safe_diagonal_build_up():
    n = 5
    s = SingularSafe(n, seed=3)
    for k in range(n):
        s.update((k, k, 2))
        assert s.rank() == k + 1
    half = F.sinv(2)
    assert s.query(3, 3) == half
    assert s.query(3, 2) == 0
    assert s.det() == 32
    s.update((4, 4, 0))
    assert s.rank() == 4 and s.query(0, 0) is FAIL


@pytest.mark.parametrize("backend", ["element", "column"])
def test_singular_safe_random_walk(backend):
    rng = np.random.default_rng(11)
    n = 7
    s = SingularSafe(n, seed=5, backend=backend)
    a = np.zeros((n, n), dtype=np.int64)
    for step in range(120):
        kind = rng.integers(3) if backend == "element" else rng.integers(2)
        if kind == 0:
            i, j = int(rng.integers(n)), int(rng.integers(n))
            v = int(rng.integers(3)) if rng.random() < 0.5 else int(rng.integers(P))
            s.update((i, j, v))
            a[i, j] = v
        elif kind == 1:
            j = int(rng.integers(n))
            col = F.random(rng, (n,)) * (rng.random(n) < 0.5)
            s.update_column(j, col)
            a[:, j] = col
        else:
            i = int(rng.integers(n))
            row = F.random(rng, (n,)) * (rng.random(n) < 0.5)
            s.update_row(i, row)
            a[i] = row
        assert s.rank() == py_rank(a, P)
        assert s.det() == py_det(a, P)
        inv = py_inverse(a, P)
        if inv is None:
            assert s.query(0, 0) is FAIL
        else:
            i = int(rng.integers(n))
            assert s.row(i).tolist() == inv[i]


def test_singular_safe_row_updates_need_element_backend():
    s = SingularSafe(3, backend="column")
    with pytest.raises(UnsupportedUpdate):
        s.update_row(0, [1, 0, 0])
    with pytest.raises(ValueError):
        SingularSafe(3, backend="banded")
