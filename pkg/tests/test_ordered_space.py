import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from coneasym import (
    ConeSpace,
    OrderUnit,
    dual_base,
    in_cone,
    in_interior,
    nonflat_decompose,
    order_le,
    u_norm,
)


def test_in_cone_examples():
    assert in_cone(ConeSpace(3), [0, 0, 0])
    assert not in_cone(ConeSpace(2), [1, -1e-12])
    assert in_cone(ConeSpace(2), [0.5, 2])


def test_in_interior_examples():
    assert in_interior(ConeSpace(2), [1, 1e-300])
    assert not in_interior(ConeSpace(2), [1, 0])
    # 1e-15 > 1e-12 * max(1, 1) is false
    assert not in_interior(ConeSpace(2, 1e-12), [1, 1e-15])
    assert in_interior(ConeSpace(2, 1e-12), [1, 2e-12])


def test_interior_tol_is_scale_invariant_for_large_vectors():
    sp = ConeSpace(2, 1e-6)
    x = np.array([1.0, 5e-6])
    assert in_interior(sp, x)
    assert in_interior(sp, 1e4 * x)
    assert not in_interior(sp, [1e4, 5e-3])


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        in_cone(ConeSpace(3), [1, 2])
    with pytest.raises(ValueError):
        u_norm(OrderUnit.ones(2), [1, 2, 3])


def test_bad_space_and_unit():
    with pytest.raises(ValueError):
        ConeSpace(0)
    with pytest.raises(ValueError):
        ConeSpace(2, -1.0)
    with pytest.raises(ValueError):
        OrderUnit(ConeSpace(2), [1.0, 0.0])


def test_u_norm_examples():
    assert u_norm(OrderUnit.ones(2), [3, -1]) == 3
    u = np.array([0.3, 7.0, 2.5])
    assert u_norm(OrderUnit(ConeSpace(3), u), u) == 1
    assert u_norm(OrderUnit(ConeSpace(2), [2, 4]), [1, 1]) == 0.5


def test_constants():
    unit = OrderUnit(ConeSpace(3), [0.5, 1.0, 4.0])
    assert unit.C_u == 4.0
    assert unit.gamma == 1.0
    assert OrderUnit(ConeSpace(2), [0.1, 0.2]).C_u == pytest.approx(10.0)


def test_dual_base_extreme_points_take_value_one_at_u():
    unit = OrderUnit(ConeSpace(3), [0.5, 1.0, 4.0])
    base = dual_base(unit)
    np.testing.assert_allclose(base.evaluate(unit.u), np.ones(3))


@pytest.mark.parametrize("x, parts", [
    ([3, -1], ([3, 0], [0, 1])),
    ([0, 0], ([0, 0], [0, 0])),
    ([-2, -2], ([0, 0], [2, 2])),
])
def test_nonflat_decompose_examples(x, parts):
    x1, x2 = nonflat_decompose(OrderUnit.ones(2), x)
    np.testing.assert_array_equal(x1, parts[0])
    np.testing.assert_array_equal(x2, parts[1])


finite = st.floats(-1e6, 1e6, allow_nan=False)
positive = st.floats(1e-3, 1e3)


@st.composite
def unit_and_vectors(draw, n_vectors=2):
    d = draw(st.integers(1, 8))
    u = draw(arrays(float, d, elements=positive))
    xs = [draw(arrays(float, d, elements=finite)) for _ in range(n_vectors)]
    return OrderUnit(ConeSpace(d), u), xs


@settings(max_examples=200, deadline=None)
@given(unit_and_vectors(1))
def test_norm_equivalence(data):
    unit, (x,) = data
    nx = np.max(np.abs(x))
    nu = u_norm(unit, x)
    assert nx / unit.C_u <= nu * (1 + 1e-12)
    assert nu <= unit.C_u * nx * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(unit_and_vectors(1))
def test_u_norm_is_max_over_dual_base(data):
    unit, (x,) = data
    vals = dual_base(unit).evaluate(x)
    assert u_norm(unit, x) == pytest.approx(np.max(np.abs(vals)))
    xp = np.abs(x)
    assert u_norm(unit, xp) == pytest.approx(np.max(dual_base(unit).evaluate(xp)))


@settings(max_examples=200, deadline=None)
@given(unit_and_vectors(2))
def test_order_characterized_by_dual_base(data):
    unit, (x, y) = data
    assert order_le(unit, x, y) == bool(np.all(x <= y))
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    assert order_le(unit, lo, hi)


@settings(max_examples=200, deadline=None)
@given(unit_and_vectors(2))
def test_u_norm_monotone_on_cone(data):
    unit, (x, y) = data
    x, y = np.abs(x), np.abs(x) + np.abs(y)
    assert u_norm(unit, x) <= u_norm(unit, y)


@settings(max_examples=200, deadline=None)
@given(unit_and_vectors(1))
def test_decomposition_properties(data):
    unit, (x,) = data
    x1, x2 = nonflat_decompose(unit, x)
    assert in_cone(unit.space, x1) and in_cone(unit.space, x2)
    np.testing.assert_array_equal(x1 - x2, x)
    nx = np.max(np.abs(x))
    assert np.max(x1) <= unit.gamma * nx and np.max(x2) <= unit.gamma * nx


@settings(max_examples=200, deadline=None)
@given(unit_and_vectors(1))
def test_interior_and_cone_relations(data):
    unit, (x,) = data
    sp = unit.space
    if in_interior(sp, x):
        assert in_cone(sp, x)
    if in_cone(sp, x) and in_cone(sp, -x):
        assert not np.any(x)
