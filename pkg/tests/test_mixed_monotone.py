import math

import numpy as np
import pytest
from scipy.linalg import expm

from sensireach.errors import OrderingError
from sensireach.interval import IntervalMatrix
from sensireach.mixed_monotone import build_decomposition, decomposition_eval, is_sign_stable, reach_oa_mm
from sensireach.models import make_linear, make_unicycle
from sensireach.problems import MONOTONE_A
from sensireach.sensitivity import flow


def test_build_decomposition_rules():
    pos = build_decomposition(IntervalMatrix([[0.1, 0.0]] * 2, [[1.0, 2.0]] * 2))
    assert pos.take_x.all() and not pos.alpha.any()
    neg = build_decomposition(IntervalMatrix([[-1.0, -2.0]] * 2, [[-0.1, 0.0]] * 2))
    assert not neg.take_x.any() and not neg.alpha.any()
    mixed = build_decomposition(IntervalMatrix([[-1.0]], [[3.0]]))
    assert mixed.take_x[0, 0] and mixed.alpha[0, 0] == 1.0
    flipped = build_decomposition(IntervalMatrix([[-3.0]], [[1.0]]))
    assert not flipped.take_x[0, 0] and flipped.alpha[0, 0] == 1.0
    tie = build_decomposition(IntervalMatrix([[-2.0]], [[2.0]]))
    assert tie.take_x[0, 0] and tie.alpha[0, 0] == 2.0
    np.testing.assert_array_equal(mixed.center, [[1.0]])


def test_sign_stability():
    stable, flag = is_sign_stable(IntervalMatrix([[0.2, -0.1, -0.9]], [[0.9, 0.9, 0.0]]))
    assert stable.tolist() == [[True, False, True]] and not flag
    assert is_sign_stable(IntervalMatrix([[0.2]], [[0.9]]))[1]


def test_eval_on_diagonal_is_flow():
    m = make_unicycle()
    spec = build_decomposition(IntervalMatrix(-np.ones((6, 6)), np.full((6, 6), 2.0)))
    x = np.array([0.5, 0.1, 0.6, 0.0, 0.01, -0.01])
    np.testing.assert_array_equal(decomposition_eval(m, 0, 10, spec, x, x), flow(m, 0, 10, x))


def test_eval_scalar_decay():
    m = make_linear([[-1.0]])
    tau = 0.7
    spec = build_decomposition(IntervalMatrix.point([[math.exp(-tau)]]))
    g = decomposition_eval(m, 0, tau, spec, np.array([2.0]), np.array([-5.0]))
    assert g[0] == pytest.approx(math.exp(-tau) * 2.0, rel=1e-10)


def test_alpha_term_dominates_for_ordered_arguments():
    m = make_unicycle()
    rng = np.random.default_rng(0)
    lo = rng.normal(size=(6, 6))
    spec = build_decomposition(IntervalMatrix(lo, lo + 1.0))
    cache = {}
    for _ in range(5):
        y = rng.random(6)
        x = y + rng.random(6)
        g = decomposition_eval(m, 0, 10, spec, x, y, cache=cache)
        for i in range(6):
            z = np.where(spec.take_x[i], x, y)
            assert g[i] >= flow(m, 0, 10, z)[i]


def test_corner_flows_cached():
    m = make_linear(MONOTONE_A)
    spec = build_decomposition(IntervalMatrix.point(expm(np.array(MONOTONE_A))))
    cache = {}
    decomposition_eval(m, 0, 1, spec, np.ones(2), np.zeros(2), cache=cache)
    assert len(cache) == 1


def test_degenerate_box_gives_point():
    m = make_unicycle()
    x = np.array([0.2, 0.4, 0.5, 0.01, 0.0, 0.02])
    spec = build_decomposition(IntervalMatrix(-np.ones((6, 6)), np.ones((6, 6))))
    box = reach_oa_mm(m, 0, 10, spec, IntervalMatrix.point(x))
    phi = flow(m, 0, 10, x)
    np.testing.assert_array_equal(box.lo, phi)
    np.testing.assert_array_equal(box.hi, phi)


def test_sign_stable_linear_is_tight():
    a = np.array(MONOTONE_A)
    tau = 1.0
    box = IntervalMatrix.from_pairs([(0.5, 1.0), (-0.2, 0.3)])
    e = expm(a * tau)
    spec = build_decomposition(IntervalMatrix.point(e))
    out = reach_oa_mm(make_linear(a), 0, tau, spec, box)
    # Exact hull of the image of a box under a nonnegative matrix
    np.testing.assert_allclose(out.lo, e @ box.lo, atol=1e-6)
    np.testing.assert_allclose(out.hi, e @ box.hi, atol=1e-6)


def test_inconsistent_bounds_raise_ordering_error():
    a = np.array(MONOTONE_A)
    e = expm(a)
    # claiming the negated sensitivity flips every selector and alpha stays 0
    spec = build_decomposition(IntervalMatrix.point(-e))
    with pytest.raises(OrderingError):
        reach_oa_mm(make_linear(a), 0, 1, spec, IntervalMatrix.from_pairs([(0, 1), (0, 1)]))


def test_bound_monotonicity_same_selectors():
    m = make_unicycle()
    rng = np.random.default_rng(5)
    box = IntervalMatrix.from_pairs([(0, 1), (0, 1), (0.4, 0.8), (-0.05, 0.05), (-0.05, 0.05), (-0.03, 0.03)])
    center = rng.normal(size=(6, 6)) + np.eye(6) * 5
    tight = IntervalMatrix(center - 3, center + 3)
    loose = IntervalMatrix(center - 4, center + 4)
    a = reach_oa_mm(m, 0, 10, build_decomposition(tight), box)
    b = reach_oa_mm(m, 0, 10, build_decomposition(loose), box)
    assert a.is_subset(b)
