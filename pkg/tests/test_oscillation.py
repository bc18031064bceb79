import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coneasym import (
    ConeSpace,
    HypothesisError,
    NotConvergedError,
    NotFixedPointError,
    OrderUnit,
    certify_rate,
    find_uniform_index,
    limit_functional,
    oscillation_step,
    trace_basis,
    trace_until,
    u_norm,
)
from conftest import random_regular

ONES2 = OrderUnit.ones(2)


def stationary(P):
    """Oracle: solve f (P - I) = 0, f 1 = 1 by a dense solve."""
    d = len(P)
    M = (P - np.eye(d)).T
    M[-1] = 1.0
    b = np.zeros(d)
    b[-1] = 1.0
    return np.linalg.solve(M, b)


def test_step_identity():
    for n in (0, 1, 7):
        assert oscillation_step(np.eye(2), ONES2, [2, 5], n) == (5, 2)


def test_step_stochastic_on_ones(chain):
    assert oscillation_step(chain, ONES2, [1, 1], 13) == pytest.approx((1, 1))


def test_step_by_hand(chain):
    # A (1, 0) = (0.9, 0.2)
    M, m = oscillation_step(chain, ONES2, [1, 0], 1)
    assert M == pytest.approx(0.9) and m == pytest.approx(0.2)


def test_step_rejects_non_fixed_unit():
    with pytest.raises(NotFixedPointError):
        oscillation_step([[0.5, 0.0], [0.0, 0.5]], ONES2, [1, 0], 1)


def test_trace_rank_one():
    tr = trace_until([[0.5, 0.5], [0.5, 0.5]], ONES2, [1, 0], eps=1e-12)
    assert tr.converged and tr.n[-1] == 1
    assert tr.M[-1] == 0.5 and tr.m[-1] == 0.5


def test_trace_periodic_hits_max_steps():
    tr = trace_until([[0, 1], [1, 0]], ONES2, [1, 0], max_steps=50)
    assert not tr.converged and tr.status == "max_steps"
    assert len(tr.n) == 51
    np.testing.assert_array_equal(tr.delta, np.ones(51))


def test_trace_converges_to_stationary_value(chain):
    f = stationary(chain)
    np.testing.assert_allclose(f, [2 / 3, 1 / 3], rtol=1e-14)
    tr = trace_until(chain, ONES2, [1, 0], eps=1e-10)
    assert tr.converged
    assert tr.m[-1] == pytest.approx(f[0], abs=1e-10)
    assert tr.M[-1] == pytest.approx(f[0], abs=1e-10)


def test_trace_widening_bracket_detected():
    # u is fixed within the 1e-9 tolerance but the operator slowly expands.
    A = (1 + 1e-10) * np.array([[0.99, 0.01], [0.01, 0.99]])
    with pytest.raises(HypothesisError, match="widened"):
        trace_until(A, ONES2, [1, 0], eps=1e-12, max_steps=100_000)


def test_trace_csv():
    tr = trace_until([[0.5, 0.5], [0.5, 0.5]], ONES2, [1, 0])
    lines = tr.to_csv().splitlines()
    assert lines[0] == "n,M,m,delta"
    assert lines[1] == "0,1,0,1"
    assert lines[2] == "1,0.5,0.5,0"


def test_limit_functional_examples(chain):
    half = [[0.5, 0.5], [0.5, 0.5]]
    np.testing.assert_allclose(limit_functional(half, ONES2, trace_basis(half, ONES2)), [0.5, 0.5])
    f0 = limit_functional(chain, ONES2, trace_basis(chain, ONES2))
    np.testing.assert_allclose(f0, stationary(chain), atol=1e-12)


def test_limit_functional_identity_not_regular():
    traces = trace_basis(np.eye(2), ONES2, max_steps=20)
    assert all(t.delta[-1] == 1 for t in traces)
    with pytest.raises(NotConvergedError):
        limit_functional(np.eye(2), ONES2, traces)


def test_certify_rank_one():
    cert = certify_rate([[0.5, 0.5], [0.5, 0.5]], ONES2, 1)
    assert cert.beta == np.nextafter(0.5, 0)
    assert 0 < cert.beta < 0.5
    assert cert.factor < 1e-15


def test_certify_golden_matrix():
    phi = (1 + 5 ** 0.5) / 2
    A = np.array([[0, 1], [1, 1]]) / phi
    u = np.array([1 / phi, 1.0])
    unit = OrderUnit(ConeSpace(2), u)
    np.testing.assert_allclose(A @ u, u, rtol=1e-15)
    assert find_uniform_index(A) == 2
    cert = certify_rate(A, unit, 2)
    # A^2 = [[1, 1], [1, 2]] / phi^2; the smallest u_k B_ik / u_i is at i=1, k=0
    expected = (1 / phi) * (1 / phi ** 2) / 1.0
    assert cert.beta == pytest.approx(expected, rel=1e-14)
    with pytest.raises(HypothesisError):
        certify_rate(A, unit, 1)


def test_certify_rejects_non_mixing():
    with pytest.raises(HypothesisError):
        certify_rate([[1, 0], [0, 0.5]], ONES2, 5)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 9))
def test_trace_invariants(seed, d):
    rng = np.random.default_rng(seed)
    A, u = random_regular(rng, d)
    unit = OrderUnit(ConeSpace(d), u)
    x = rng.random(d) * rng.uniform(0.1, 10)
    tr = trace_until(A, unit, x, eps=1e-12)
    assert tr.converged
    slack = 1e-12 * max(1.0, np.max(np.abs(tr.M)))
    assert np.all(np.diff(tr.M) <= slack)
    assert np.all(np.diff(tr.m) >= -slack)
    assert np.all(tr.m <= tr.M + slack)
    # sandwich m u <= A^n x <= M u, and the error bound on A^n x - f0(x) u
    f0 = limit_functional(A, unit, trace_basis(A, unit))
    y = x.copy()
    for k in range(len(tr.n)):
        assert np.all(tr.m[k] * u <= y + 1e-12 * np.max(y))
        assert np.all(y <= tr.M[k] * u + 1e-12 * np.max(y))
        fx = f0 @ x
        assert abs(fx - tr.m[k]) <= tr.delta[k] + 1e-11 * max(1, fx)
        assert u_norm(unit, y - fx * u) <= tr.delta[k] + 1e-11 * max(1, fx)
        y = A @ y
