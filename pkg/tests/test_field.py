import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyninverse.errors import DimensionMismatch, NotUnipotent, Singular, ZeroInverse
from dyninverse.field import (DEFAULT_PRIME, FieldElement, PolyRing, PrimeField, TruncatedPoly, fe_add,
                              fe_inv, fe_mul, fe_sub, poly_from_array, poly_inv_unit, poly_mul)
from oracles import py_det, py_inverse, py_matmul, py_rank

F = PrimeField()
F5, F7 = PrimeField(5), PrimeField(7)
P = DEFAULT_PRIME


def fe(v, f=F):
    return f.element(v)


def test_wraparound_and_identity():
    assert fe_add(fe(P - 1), fe(1)) == 0
    x = fe(123456789)
    assert fe_mul(fe(1), x) == x


def test_small_field_products_and_inverses():
    assert fe_mul(fe(3, F5), fe(4, F5)).value == 2
    assert fe_inv(fe(2, F5)).value == 3
    assert fe_inv(fe(3, F7)).value == 5
    assert fe_inv(fe(1)).value == 1
    with pytest.raises(ZeroInverse):
        fe_inv(fe(0, F5))


def test_elements_stay_reduced():
    with pytest.raises(ValueError):
        FieldElement(5, F5)
    assert fe_sub(fe(0, F7), fe(1, F7)).value == 6


@pytest.mark.parametrize("p", [0, 1, 2, 4, 15, 2**62 + 135])
def test_bad_modulus(p):
    with pytest.raises(ValueError):
        PrimeField(p)


@given(st.integers(0, P - 1), st.integers(0, P - 1))
def test_scalar_ops_match_python_ints(a, b):
    assert F.mulmod(np.int64(a), np.int64(b)) == a * b % P
    assert F.sadd(a, b) == (a + b) % P
    assert F.ssub(a, b) == (a - b) % P
    if a:
        assert F.sinv(a) == pow(a, -1, P)


def test_poly_mul_examples():
    f = F5
    one = TruncatedPoly.of([1], f, 3)
    x1 = TruncatedPoly.of([1, 1], f, 3)
    assert poly_mul(x1, one) == x1
    assert poly_mul(TruncatedPoly.of([1, 1], f, 2), TruncatedPoly.of([1, 1], f, 2)).coeffs == (1, 2)
    top = TruncatedPoly.of([0, 0, 1], f, 3)
    x = TruncatedPoly.of([0, 1], f, 3)
    assert poly_mul(top, x).coeffs == (0, 0, 0)


def test_poly_inverse_examples():
    f = F7
    assert poly_inv_unit(TruncatedPoly.of([1], f, 3)).coeffs == (1, 0, 0)
    assert poly_inv_unit(TruncatedPoly.of([1, -1], f, 3)).coeffs == (1, 1, 1)
    assert poly_inv_unit(TruncatedPoly.of([3], f, 3)).coeffs == (5, 0, 0)
    with pytest.raises(DimensionMismatch):
        poly_mul(TruncatedPoly.of([1], f, 2), TruncatedPoly.of([1], f, 3))


@settings(max_examples=40)
@given(st.lists(st.integers(0, 100), min_size=4, max_size=4), st.lists(st.integers(0, 100), min_size=4, max_size=4))
def test_poly_mul_matches_schoolbook(a, b):
    pa, pb = poly_from_array(a, F7), poly_from_array(b, F7)
    want = [sum(a[i] * b[k - i] for i in range(k + 1)) % 7 for k in range(4)]
    assert list(poly_mul(pa, pb).coeffs) == want


@settings(max_examples=30)
@given(st.integers(1, 6), st.integers(1, 300), st.integers(1, 6), st.integers(0, 2**32))
def test_matmul_matches_python(r, k, c, seed):
    rng = np.random.default_rng(seed)
    a, b = F.random(rng, (r, k)), F.random(rng, (k, c))
    assert F.matmul(a, b).tolist() == py_matmul(a, b, P)


def test_matmul_large_inner_dimension():
    rng = np.random.default_rng(0)
    a, b = F.random(rng, (3, 3000)), F.random(rng, (3000, 2))
    assert F.matmul(a, b).tolist() == py_matmul(a, b, P)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32), st.sampled_from([5, 7, 101, DEFAULT_PRIME]))
def test_inverse_det_rank_match_python(n, seed, p):
    f = PrimeField(p)
    rng = np.random.default_rng(seed)
    a = f.random(rng, (n, n))
    want = py_inverse(a, p)
    assert f.rank(a) == py_rank(a, p)
    assert f.det(a) == py_det(a, p)
    if want is None:
        with pytest.raises(Singular):
            f.gaussian_inverse(a)
    else:
        inv, det = f.gaussian_inverse(a)
        assert inv.tolist() == want
        assert det == py_det(a, p)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 70), st.integers(1, 5), st.integers(0, 2**32))
def test_rank_of_low_rank_products(n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, n)
    a = F.matmul(F.random(rng, (n, r)), F.random(rng, (r, n)))
    assert F.rank(a) == py_rank(a, P)


def test_inverse_of_matrices_needing_pivoting():
    # leading principal minors vanish, so elimination must permute
    a = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=np.int64)
    inv, det = F.gaussian_inverse(a)
    assert inv.tolist() == py_inverse(a, P)
    assert det == py_det(a, P)
    big = np.zeros((100, 100), dtype=np.int64)
    big[np.arange(100), (np.arange(100) + 37) % 100] = 3
    inv, _ = F.gaussian_inverse(big)
    assert (F.matmul(big, inv) == np.eye(100, dtype=np.int64)).all()


def test_poly_ring_matmul_is_convolution():
    R = PolyRing(F7, 3)
    rng = np.random.default_rng(1)
    a, b = R.random(rng, (2, 3)), R.random(rng, (3, 2))
    got = R.matmul(a, b)
    for i in range(2):
        for j in range(2):
            want = [0, 0, 0]
            for k in range(3):
                for s in range(3):
                    for t in range(3 - s):
                        want[s + t] += int(a[i, k, s]) * int(b[k, j, t])
            assert got[i, j].tolist() == [w % 7 for w in want]


def test_unipotent_inverse_is_geometric_series():
    R = PolyRing(F, 4)
    rng = np.random.default_rng(3)
    N = F.random(rng, (5, 5))
    M = R.eye(5)
    M[:, :, 1] = F.neg(N)
    inv = R.unipotent_inverse(M)
    power = np.eye(5, dtype=np.int64)
    for k in range(4):
        assert (inv[:, :, k] == power).all()
        power = F.matmul(power, N)
    M2 = M.copy()
    M2[0, 0, 0] = 2
    with pytest.raises(NotUnipotent):
        R.unipotent_inverse(M2)


def test_poly_gaussian_inverse_needs_unit_pivots():
    R = PolyRing(F7, 3)
    rng = np.random.default_rng(4)
    a = R.random(rng, (4, 4))
    a[:, :, 0] = F7.random(rng, (4, 4))
    while F7.rank(a[:, :, 0]) < 4:
        a[:, :, 0] = F7.random(rng, (4, 4))
    inv, det = R.gaussian_inverse(a)
    assert (R.matmul(a, inv) == R.eye(4)).all()
    assert (det == R.det(a)).all()
