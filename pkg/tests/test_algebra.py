import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyninverse.algebra import DetTracker, LinearSystem, ProductChain, RankTracker, det_update, ls_update
from dyninverse.errors import DimensionMismatch, Singular
from dyninverse.matcore import default_ring
from oracles import cofactor_adjugate, py_det, py_inverse, py_matmul, py_rank

F = default_ring()
P = F.p


def random_invertible(rng, n):
    while True:
        a = F.random(rng, (n, n))
        if F.rank(a) == n:
            return a


def test_det_examples():
    t = DetTracker(F.eye(1))
    assert det_update(t, (0, 0, 9)) == 9
    a, b = 3, 5
    t = DetTracker(F.eye(2))
    t.update([(0, 1, a)])
    assert t.update([(1, 0, b)]) == (1 - a * b) % P
    with pytest.raises(ValueError):
        DetTracker(F.eye(2), mode="row")


def test_adjoint_of_diagonal():
    t = DetTracker(np.diag([4, 7]).astype(np.int64))
    assert t.adjoint(0, 0) == 7 and t.adjoint(1, 1) == 4
    assert t.adjoint(0, 1) == 0


@pytest.mark.parametrize("mode", ["element", "column"])
@settings(max_examples=10, deadline=None)
@given(n=st.integers(1, 9), seed=st.integers(0, 2**32))
def test_det_and_adjoint_against_cofactors(mode, n, seed):
    rng = np.random.default_rng(seed)
    t = DetTracker(random_invertible(rng, n), mode)
    for _ in range(2 * n):
        if rng.random() < 0.5:
            ch = [(int(rng.integers(n)), int(rng.integers(n)), int(rng.integers(P)))]
            after = t.A.copy()
            for i, j, v in ch:
                after[i, j] = v
            if py_det(after, P) == 0:
                with pytest.raises(Singular):
                    t.update(ch)
                continue
            assert t.update(ch) == py_det(after, P)
        else:
            j = int(rng.integers(n))
            col = F.random(rng, (n,))
            after = t.A.copy()
            after[:, j] = col
            if py_det(after, P) == 0:
                with pytest.raises(Singular):
                    t.update_column(j, col)
                continue
            assert t.update_column(j, col) == py_det(after, P)
        adj = cofactor_adjugate(t.A, P)
        i, j = int(rng.integers(n)), int(rng.integers(n))
        assert t.adjoint(i, j) == adj[i][j]


def test_linear_system_solution():
    rng = np.random.default_rng(0)
    n, k = 6, 2
    A = random_invertible(rng, n)
    M = F.random(rng, (n, k))
    s = LinearSystem(A, M)
    want = py_matmul(py_inverse(A, P), M, P)
    assert s.solution_column(1).tolist() == [r[1] for r in want]
    ls_update(s, "M", 2, 0, 11)
    M[2, 0] = 11
    ls_update(s, "A", 0, 3, 5)
    A[0, 3] = 5
    want = py_matmul(py_inverse(A, P), M, P)
    assert s.solution(4, 0) == want[4][0]
    row = F.random(rng, (n,))
    s.replace_row(1, row, [1, 2])
    A[1], M[1] = row, [1, 2]
    want = py_matmul(py_inverse(A, P), M, P)
    assert [s.solution(i, j) for i in range(n) for j in range(k)] == [x for r in want for x in r]
    with pytest.raises(ValueError):
        ls_update(s, "B", 0, 0, 1)
    with pytest.raises(DimensionMismatch):
        LinearSystem(F.eye(3), F.zeros(2, 1))


def test_product_chain_examples():
    a = np.array([[2]], dtype=np.int64)
    b = np.array([[3]], dtype=np.int64)
    c = ProductChain([a, b])
    assert c.entry(0, 1, 0, 0) == 6
    assert c.entry(0, 0, 0, 0) == 2
    ident = ProductChain([F.eye(3), F.eye(3)])
    assert ident.query(0, 1, range(3), range(3)).tolist() == F.eye(3).tolist()
    with pytest.raises(DimensionMismatch):
        ProductChain([F.eye(2), F.eye(3)])


def test_product_chain_random_three_factors():
    rng = np.random.default_rng(1)
    dims = [3, 4, 2, 5]
    fs = [F.random(rng, (dims[r], dims[r + 1])) for r in range(3)]
    c = ProductChain(fs)
    for _ in range(10):
        w = int(rng.integers(3))
        i, j = int(rng.integers(dims[w])), int(rng.integers(dims[w + 1]))
        v = int(rng.integers(P))
        c.update([(w, i, j, v)])
        fs[w][i, j] = v
        for r in range(3):
            for q in range(r, 3):
                prod = fs[r]
                for x in range(r + 1, q + 1):
                    prod = np.array(py_matmul(prod, fs[x], P), dtype=np.int64)
                got = c.query(r, q, range(dims[r]), range(dims[q + 1]))
                assert got.tolist() == prod.tolist()
    assert (c.factor(1) == fs[1]).all()


def test_bipartite_rank_under_column_replacements():
    rng = np.random.default_rng(2)
    n = 8
    t = RankTracker(n, seed=4, backend="column")
    a = np.zeros((n, n), dtype=np.int64)
    for _ in range(200):
        j = int(rng.integers(n))
        col = F.random(rng, (n,)) * (rng.random(n) < 0.3)
        a[:, j] = col
        assert t.update_column(j, col) == py_rank(a, P)


def test_rank_tracker_element_and_row():
    t = RankTracker(3)
    assert t.update(0, 0, 1) == 1
    assert t.update(1, 1, 1) == 2
    assert t.update_row(2, [1, 1, 0]) == 2
    assert t.update_row(2, [0, 0, 1]) == 3
    assert t.rank() == 3
