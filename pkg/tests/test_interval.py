import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sensireach.errors import DimensionError
from sensireach.interval import (
    Interval,
    IntervalMatrix,
    iv_abs_sup,
    iv_add,
    iv_contains,
    iv_hull,
    iv_kron,
    iv_matmul,
    iv_norm_inf,
    iv_scalar_mul,
    outward_rounding,
)


def rand_iv(rng, shape, scale=2.0):
    a = rng.uniform(-scale, scale, shape)
    b = rng.uniform(-scale, scale, shape)
    return IntervalMatrix(np.minimum(a, b), np.maximum(a, b))


def member(rng, m):
    return m.lo + (m.hi - m.lo) * rng.random(m.lo.shape)


def test_interval_rejects_empty_and_nonfinite():
    with pytest.raises(ValueError):
        Interval(1.0, 0.0)
    with pytest.raises(ValueError):
        Interval(0.0, np.inf)
    with pytest.raises(ValueError):
        IntervalMatrix([[1.0]], [[0.0]])
    with pytest.raises(DimensionError):
        IntervalMatrix([1.0, 2.0], [1.0, 2.0, 3.0])


def test_add_examples():
    r = iv_add(Interval(0, 1), Interval(2, 3))
    assert (r.lo, r.hi) == (2, 4)
    a = rand_iv(np.random.default_rng(0), (3, 3))
    assert iv_add(a, IntervalMatrix.zeros((3, 3))) == a
    with pytest.raises(DimensionError):
        iv_add(a, IntervalMatrix.zeros((2, 3)))


def test_scalar_mul_examples():
    r = iv_scalar_mul(Interval(-1, 2), Interval(3, 4))
    assert (r.lo, r.hi) == (-4, 8)
    r = iv_scalar_mul(Interval(0, 0), Interval(5, 9))
    assert (r.lo, r.hi) == (0, 0)
    m = iv_scalar_mul(Interval(-1, 1), IntervalMatrix.eye(2))
    np.testing.assert_array_equal(m.lo, [[-1, 0], [0, -1]])
    np.testing.assert_array_equal(m.hi, [[1, 0], [0, 1]])


def test_matmul_examples():
    rng = np.random.default_rng(1)
    b = rand_iv(rng, (2, 3))
    assert iv_matmul(IntervalMatrix.eye(2), b) == b
    r = iv_matmul(IntervalMatrix([[-1.0]], [[2.0]]), IntervalMatrix([[3.0]], [[4.0]]))
    s = iv_scalar_mul(Interval(-1, 2), Interval(3, 4))
    assert (r.lo[0, 0], r.hi[0, 0]) == (s.lo, s.hi)
    with pytest.raises(DimensionError):
        iv_matmul(rand_iv(rng, (2, 3)), rand_iv(rng, (2, 3)))


def test_matmul_vector_right():
    rng = np.random.default_rng(2)
    a, v = rand_iv(rng, (3, 4)), rand_iv(rng, (4,))
    r = iv_matmul(a, v)
    full = iv_matmul(a, IntervalMatrix(v.lo[:, None], v.hi[:, None]))
    np.testing.assert_array_equal(r.lo, full.lo[:, 0])
    np.testing.assert_array_equal(r.hi, full.hi[:, 0])


def test_kron_examples():
    rng = np.random.default_rng(3)
    b = rand_iv(rng, (2, 3))
    assert iv_kron(IntervalMatrix([[1.0]]), b) == b
    assert iv_kron(IntervalMatrix.eye(2), IntervalMatrix.eye(3)) == IntervalMatrix.eye(6)
    pa, pb = rng.normal(size=(2, 3)), rng.normal(size=(3, 2))
    r = iv_kron(IntervalMatrix.point(pa), IntervalMatrix.point(pb))
    np.testing.assert_array_equal(r.lo, np.kron(pa, pb))
    np.testing.assert_array_equal(r.hi, np.kron(pa, pb))


def test_kron_block_layout():
    a = IntervalMatrix([[-1.0, 0.0], [1.0, 2.0]], [[1.0, 0.5], [1.0, 3.0]])
    b = IntervalMatrix([[0.0, -2.0, 1.0]], [[1.0, 2.0, 1.0]])
    r = iv_kron(a, b)
    assert r.shape == (2, 6)
    for i in range(2):
        for j in range(2):
            blk = iv_scalar_mul(Interval(a.lo[i, j], a.hi[i, j]), b)
            np.testing.assert_array_equal(r.lo[i:i + 1, 3 * j:3 * j + 3], blk.lo)
            np.testing.assert_array_equal(r.hi[i:i + 1, 3 * j:3 * j + 3], blk.hi)


def test_hull_examples():
    r = iv_hull(Interval(0, 1), Interval(2, 3))
    assert (r.lo, r.hi) == (0, 3)
    rng = np.random.default_rng(4)
    a, b = rand_iv(rng, (3, 2)), rand_iv(rng, (3, 2))
    assert iv_hull(a, a) == a
    h = iv_hull(a, b)
    assert a.is_subset(h) and b.is_subset(h)


def test_norm_and_abs_sup():
    assert iv_norm_inf(IntervalMatrix([[-2.0, 0.0]], [[1.0, 3.0]])) == 5.0
    assert iv_norm_inf(IntervalMatrix.zeros((3, 3))) == 0.0
    m = np.random.default_rng(5).normal(size=(4, 4))
    assert iv_norm_inf(IntervalMatrix.point(m)) == pytest.approx(np.linalg.norm(m, np.inf), rel=1e-15)
    assert iv_abs_sup(Interval(-2, 1)) == 2
    assert iv_abs_sup(Interval(0, 0)) == 0
    assert iv_abs_sup(Interval(3, 5)) == 5


def test_norm_zero_iff_zero_matrix():
    assert iv_norm_inf(IntervalMatrix([[0.0, -1e-300]], [[0.0, 0.0]])) > 0
    assert iv_norm_inf(IntervalMatrix.zeros((2, 5))) == 0


def test_contains_examples():
    u = IntervalMatrix([0.0], [1.0])
    assert iv_contains(u, [0.5])
    assert not iv_contains(u, [1.0000001])
    assert iv_contains(u, [1.0000001], slack=1e-6)
    with pytest.raises(DimensionError):
        iv_contains(u, [0.5, 0.5])
    with pytest.raises(ValueError):
        iv_contains(u, [0.5], slack=-1)


def test_outward_rounding_widens_by_ulps():
    a = IntervalMatrix([[0.1]], [[0.3]])
    plain = iv_add(a, a)
    with outward_rounding(4):
        wide = iv_add(a, a)
    lo, hi = plain.lo[0, 0], plain.hi[0, 0]
    for _ in range(4):
        lo, hi = np.nextafter(lo, -np.inf), np.nextafter(hi, np.inf)
    assert wide.lo[0, 0] == lo and wide.hi[0, 0] == hi
    assert iv_add(a, a) == plain


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matmul_inclusion_randomized_shapes(seed):
    rng = np.random.default_rng(seed)
    p, q, s = rng.integers(1, 5, size=3)
    a, b = rand_iv(rng, (p, q)), rand_iv(rng, (q, s))
    r = iv_matmul(a, b)
    for _ in range(20):
        assert iv_contains(r, member(rng, a) @ member(rng, b), slack=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kron_inclusion_randomized_shapes(seed):
    rng = np.random.default_rng(seed)
    a = rand_iv(rng, tuple(rng.integers(1, 4, size=2)))
    b = rand_iv(rng, tuple(rng.integers(1, 4, size=2)))
    r = iv_kron(a, b)
    for _ in range(20):
        assert iv_contains(r, np.kron(member(rng, a), member(rng, b)))
