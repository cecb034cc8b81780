import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyninverse.errors import DimensionMismatch, PreconditionViolated, Singular
from dyninverse.field import PrimeField
from dyninverse.matcore import (CLASSICAL, ColSparse, MulKernel, RowSparse, TransformRep, default_ring,
                                gaussian_inverse, gaussian_rank, invert_transform, mat_mul, partial_invert,
                                tmul)
from oracles import py_inverse, py_matmul

F = default_ring()
F5 = PrimeField(5)


def random_transform(rng, n, J, ring=F):
    """I+C with an invertible pivot block."""
    J = np.sort(np.asarray(J))
    while True:
        cols = ring.random(rng, (n, len(J)))
        t = TransformRep(n, J, cols)
        if ring.rank(cols[J]) == len(J):
            return t


def test_identity_and_scalar_products():
    rng = np.random.default_rng(0)
    b = F.random(rng, (5, 7))
    assert (mat_mul(F.eye(5), b) == b).all()
    assert mat_mul(np.array([[3]]), np.array([[4]]), ring=F5).tolist() == [[2]]
    with pytest.raises(DimensionMismatch):
        mat_mul(F.eye(3), F.eye(4))


def test_strassen_matches_classical_small_field():
    rng = np.random.default_rng(1)
    a, b = F5.random(rng, (9, 9)), F5.random(rng, (9, 9))
    fast = mat_mul(a, b, MulKernel("strassen", strassen_cutoff=2), F5)
    assert (fast == mat_mul(a, b, CLASSICAL, F5)).all()
    assert fast.tolist() == py_matmul(a, b, 5)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 70), st.integers(1, 70), st.integers(1, 70), st.integers(0, 2**32))
def test_strassen_matches_python_on_odd_shapes(r, k, c, seed):
    rng = np.random.default_rng(seed)
    a, b = F.random(rng, (r, k)), F.random(rng, (k, c))
    got = mat_mul(a, b, MulKernel("strassen", strassen_cutoff=8))
    assert got.tolist() == py_matmul(a, b, F.p)


def test_unknown_kernel_rejected():
    with pytest.raises(ValueError):
        MulKernel("winograd")


def test_tmul_identity_and_support():
    n = 6
    eye = TransformRep.identity(n)
    assert tmul(eye, eye).J.size == 0
    rng = np.random.default_rng(2)
    a = TransformRep(n, [1], F.random(rng, (n, 1)))
    b = TransformRep(n, [2], F.random(rng, (n, 1)))
    out = tmul(a, b)
    assert set(out.J.tolist()) <= {1, 2}
    assert (out.densify() == F.matmul(a.densify(), b.densify())).all()


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 20), st.integers(0, 2**32))
def test_tmul_matches_dense_product(n, seed):
    rng = np.random.default_rng(seed)
    ja = rng.choice(n, int(rng.integers(0, n + 1)), replace=False)
    jb = rng.choice(n, int(rng.integers(0, n + 1)), replace=False)
    a = TransformRep(n, ja, F.random(rng, (n, ja.size)))
    b = TransformRep(n, jb, F.random(rng, (n, jb.size)))
    assert tmul(a, b).densify().tolist() == py_matmul(a.densify(), b.densify(), F.p)


def test_invert_transform_examples():
    assert invert_transform(TransformRep.identity(4)).J.size == 0
    t = TransformRep(2, [0], np.array([[2], [3]]))
    inv = invert_transform(t, F5)
    assert inv.J.tolist() == [0]
    assert inv.cols[:, 0].tolist() == [3, 1]
    assert (F5.matmul(t.densify(F5), inv.densify(F5)) == np.eye(2)).all()


def test_invert_transform_dense_agrees_with_gaussian():
    rng = np.random.default_rng(3)
    t = random_transform(rng, 8, range(8))
    assert invert_transform(t).densify().tolist() == py_inverse(t.densify(), F.p)


def test_invert_transform_singular_pivot():
    t = TransformRep(3, [0, 1], np.array([[1, 2], [2, 4], [5, 6]]))
    with pytest.raises(Singular):
        invert_transform(t)


class CountingRows:
    """Wraps a TransformRep and records which rows were read."""

    def __init__(self, t):
        self.t, self.n, self.J = t, t.n, t.J
        self.read: set[int] = set()

    def take_rows(self, rows):
        self.read |= set(int(r) for r in rows)
        return self.t.take_rows(rows)


def test_partial_invert_pivot_block():
    rng = np.random.default_rng(4)
    n, J = 10, [2, 5, 7]
    t = random_transform(rng, n, J)
    got = partial_invert(t, J)
    want = py_inverse(t.cols[J], F.p)
    assert got.data.tolist() == want


def test_partial_invert_identity_rows():
    t = TransformRep.identity(5)
    blk = partial_invert(t, [1, 3])
    assert (blk.densify() == F.eye(5)[[1, 3]]).all()


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 32), st.integers(0, 2**32))
def test_partial_invert_reads_only_requested_rows(n, seed):
    rng = np.random.default_rng(seed)
    J = np.sort(rng.choice(n, int(rng.integers(1, n)), replace=False))
    t = random_transform(rng, n, J)
    extra = rng.choice(np.setdiff1d(np.arange(n), J), int(rng.integers(0, n - J.size + 1)), replace=False)
    rows = np.concatenate([J, extra])
    rng.shuffle(rows)
    probe = CountingRows(t)
    got = partial_invert(probe, rows)
    assert probe.read == set(rows.tolist())
    full = py_inverse(t.densify(), F.p)
    assert got.densify().tolist() == [full[r] for r in rows]


def test_partial_invert_needs_pivot_rows():
    rng = np.random.default_rng(5)
    t = random_transform(rng, 6, [1, 4])
    with pytest.raises(PreconditionViolated):
        partial_invert(t, [1, 2])


def test_gaussian_examples():
    inv, det = gaussian_inverse(F.eye(4))
    assert (inv == F.eye(4)).all() and det == 1
    inv, det = gaussian_inverse(np.array([[2, 0], [3, 1]]), F5)
    assert inv.tolist() == [[3, 0], [1, 1]] and det == 2
    with pytest.raises(Singular):
        gaussian_inverse(np.zeros((3, 3), dtype=np.int64))
    with pytest.raises(DimensionMismatch):
        gaussian_inverse(np.zeros((2, 3), dtype=np.int64))


def test_gaussian_rank_examples():
    rng = np.random.default_rng(6)
    assert gaussian_rank(np.zeros((4, 4), dtype=np.int64)) == 0
    assert gaussian_rank(F.eye(7)) == 7
    u, v = F.random(rng, (5, 1), nonzero=True), F.random(rng, (1, 5), nonzero=True)
    assert gaussian_rank(F.matmul(u, v)) == 1


def test_sparse_round_trips():
    rng = np.random.default_rng(7)
    c = ColSparse(5, [3, 1], F.random(rng, (5, 2)))
    assert c.J.tolist() == [1, 3]
    dense = c.densify()
    assert (ColSparse.from_dense(dense).densify() == dense).all()
    assert (c.transpose().densify() == dense.T).all()
    r = RowSparse(5, [0], F.random(rng, (1, 5)))
    assert (r.transpose().transpose().densify() == r.densify()).all()
    with pytest.raises(ValueError):
        ColSparse(3, [1, 1], F.zeros(3, 2))
    with pytest.raises(DimensionMismatch):
        TransformRep(3, [0], F.zeros(2, 1))
