import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyninverse.errors import NotUnipotent, Unreachable
from dyninverse.field import PolyRing, PrimeField
from dyninverse.matcore import default_ring
from dyninverse.polymat import DistanceOracle, DivisionFreeDet, PolyInverse, dist_update, unipotent_inverse
from oracles import bfs_dist, py_det, walk_counts

F = default_ring()
P = F.p


def test_unipotent_inverse_examples():
    R = PolyRing(F, 3)
    eye = R.eye(2)
    assert (unipotent_inverse(eye, R) == eye).all()
    m = R.eye(1)
    m[0, 0, 1] = P - 1  # 1 - X
    assert unipotent_inverse(m, R)[0, 0].tolist() == [1, 1, 1]
    bad = R.eye(1)
    bad[0, 0, 0] = 2
    with pytest.raises(NotUnipotent):
        unipotent_inverse(bad, R)


def test_poly_inverse_cleared_graph_is_identity():
    s = PolyInverse(4, 3)
    s.update(0, 1, 5)
    s.update(0, 1, 0)
    got = s.query(range(4), range(4))
    assert (got == PolyRing(F, 3).eye(4)).all()


@pytest.mark.parametrize("seed", range(3))
def test_poly_inverse_counts_walks(seed):
    rng = np.random.default_rng(seed)
    n, m = 12, 5
    s = PolyInverse(n, m)
    A = np.zeros((n, n), dtype=np.int64)
    for _ in range(3 * n):
        i, j = int(rng.integers(n)), int(rng.integers(n))
        a = int(rng.integers(0, 4))
        s.update(i, j, a)
        A[i, j] = a
    walks = walk_counts(A, m, P)
    for i in range(n):
        for j in range(n):
            assert s.entry(i, j).tolist() == [walks[k][i][j] for k in range(m)]


def test_division_free_det_examples():
    assert DivisionFreeDet(F.eye(3)).det() == 1
    assert DivisionFreeDet(np.zeros((3, 3), dtype=np.int64)).det() == 0
    d = DivisionFreeDet(np.zeros((2, 2), dtype=np.int64))
    assert d.update(0, 0, 3) == 0
    assert d.update(1, 1, 4) == 12


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32))
def test_division_free_det_through_singular_states(n, seed):
    rng = np.random.default_rng(seed)
    field = PrimeField(101)
    A = np.zeros((n, n), dtype=np.int64)
    d = DivisionFreeDet(A, field)
    for _ in range(3 * n):
        i, j, v = int(rng.integers(n)), int(rng.integers(n)), int(rng.integers(101))
        A[i, j] = v
        assert d.update(i, j, v) == py_det(A, 101)


def test_distance_examples():
    d = DistanceOracle(3, s=0, t=2)
    d.add_edge(0, 1)
    d.add_edge(1, 2)
    assert d.query() == 2
    assert d.query(1, 1) == 0
    d.remove_edge(1, 2)
    with pytest.raises(Unreachable):
        d.query()


@pytest.mark.parametrize("seed", range(3))
def test_distance_matches_bfs(seed):
    rng = np.random.default_rng(seed)
    n = 32
    d = DistanceOracle(n, mu=0.5, seed=seed)
    succ: dict[int, set[int]] = {}
    for step in range(60):
        u, v = int(rng.integers(n)), int(rng.integers(n))
        if u == v:
            continue
        present = rng.random() < 0.7
        dist_update(d, u, v, present)
        if present:
            succ.setdefault(u, set()).add(v)
        else:
            succ.get(u, set()).discard(v)
        if step % 5 == 0:
            s, t = int(rng.integers(n)), int(rng.integers(n))
            want = bfs_dist(succ, s, t)
            if want is None:
                with pytest.raises(Unreachable):
                    d.query(s, t)
            else:
                assert d.query(s, t) == want
