"""Regression fixtures: two regular Markov operators without a strongly
positive power, and random walks given by a discretized stochastic kernel.

``example1``
    ``(Ax)(s) = phi(s) * (int_0^theta x + int_0^sqrt(s) x)`` on ``C[0, 1]``
    with ``phi(s) = 1 / (theta + sqrt(s))``, discretized on a uniform grid.
``example2``
    The stochastic matrix whose row ``k`` is
    ``(1/2, 1/4, ..., 2^-k, 2^-k, 0, ...)``, truncated to ``N x N``.  Its
    stationary distribution is ``c_n - c_{n+1}``, ``c_n = 2^(-(n-1)n/2)``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import find_positivity_index, limit_decomposition
from .exceptions import HypothesisError, NotConvergedError, RegularityError
from .operator import PositiveOperator, op_norm

__all__ = [
    "Example1Operator",
    "Example2Operator",
    "KernelWalk",
    "build_example1",
    "example1_positivity_index",
    "example1_analytic_index",
    "build_example2",
    "example2_closed_form",
    "example2_limit_distribution",
    "example2_eventual_positivity",
    "example2_index_profile",
    "kernel_walk",
    "kernel_walk_convergence",
]

QUADRATURE_RULES = ("fractional", "truncated")


@dataclass(frozen=True, eq=False)
class Example1Operator:
    theta: float
    grid_size: int
    rule: str
    nodes: np.ndarray
    matrix: np.ndarray

    @property
    def operator(self):
        return PositiveOperator.from_matrix(self.matrix)

    def markov_defect(self):
        """``|A 1 - 1|_inf``."""
        return float(np.max(np.abs(self.matrix.sum(axis=1) - 1.0)))


def build_example1(theta, grid_size, rule="fractional"):
    """Midpoint discretization of the example-1 integral operator.

    Row ``i`` is evaluated at the cell midpoint ``s_i``.  An integral
    ``int_0^a x`` becomes ``sum_j w_j(a) x(t_j)``:

    * ``rule="fractional"``: ``w_j(a)`` is the length of ``[0, a]`` inside
      cell ``j``, so constants are integrated exactly and ``A 1 = 1`` up to
      rounding;
    * ``rule="truncated"``: only cells lying entirely inside ``[0, a]``
      count, a first-order rule whose row-sum defect halves with the mesh.

    Both keep exact zeros where the kernel vanishes.
    """
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta!r}")
    if int(grid_size) != grid_size or grid_size < 8:
        raise ValueError(f"grid_size must be an integer >= 8, got {grid_size!r}")
    if rule not in QUADRATURE_RULES:
        raise ValueError(f"rule must be one of {QUADRATURE_RULES}, got {rule!r}")
    n = int(grid_size)
    h = 1.0 / n
    left = np.arange(n) * h
    nodes = left + 0.5 * h

    def weights(a):
        a = np.asarray(a, dtype=float)[..., None]
        if rule == "fractional":
            return np.clip(a - left, 0.0, h)
        return np.where(left + h <= a, h, 0.0)

    root = np.sqrt(nodes)
    W = weights(theta)[None, :] + weights(root)
    A = W / (theta + root)[:, None]
    return Example1Operator(float(theta), n, rule, nodes, A)


def example1_analytic_index(theta, p):
    """Index ``m`` with ``A^m x > 0`` but ``(A^(m-1) x)(0) = 0`` when ``x``
    vanishes exactly on ``[0, p]``.

    ``Ax`` vanishes exactly on ``[0, p^2]`` when ``p >= theta`` and is
    everywhere positive when ``p < theta``, so ``m`` is the least
    ``m >= 1`` with ``p^(2^(m-1)) < theta``, i.e.
    ``theta^(1/2^(m-2)) <= p < theta^(1/2^(m-1))``.  ``p = 0`` gives 0.
    """
    if not 0 <= p < 1:
        raise ValueError(f"p must lie in [0, 1), got {p!r}")
    if p == 0:
        return 0
    m = 1
    while p >= theta:
        p = p * p
        m += 1
    return m


def _example1_thresholds(theta):
    out, k = [], 0
    while True:
        thr = theta ** (0.5 ** k)
        if 1 - thr < 1e-12 or k > 60:
            return out
        out.append(thr)
        k += 1


def example1_positivity_index(op, p, margin_cells=2, max_power=10_000):
    """First ``m`` with ``A^m x`` positive at every node, ``x`` the indicator
    of ``(p, 1]`` sampled at the nodes (``A^0 = I``).

    Raises ``ValueError`` if ``p`` lies within ``margin_cells`` cells of a
    threshold ``theta^(1/2^k)``: the discrete answer is then indeterminate at
    this resolution.
    """
    if not 0 <= p < 1:
        raise ValueError(f"p must lie in [0, 1), got {p!r}")
    h = 1.0 / op.grid_size
    for thr in _example1_thresholds(op.theta):
        if abs(p - thr) < margin_cells * h:
            raise ValueError(
                f"p = {p!r} within {margin_cells} cells of threshold {thr:.6g}: "
                "indeterminate at this resolution"
            )
    x = (op.nodes > p).astype(float) if p > 0 else np.ones(op.grid_size)
    for m in range(max_power + 1):
        if np.all(x > 0):
            return m
        x = op.matrix @ x
    raise NotConvergedError(f"no positive iterate within {max_power} steps")


@dataclass(frozen=True, eq=False)
class Example2Operator:
    N: int
    matrix: np.ndarray

    @property
    def operator(self):
        return PositiveOperator.from_matrix(self.matrix)


def build_example2(N):
    """``N x N`` truncation; the mass beyond column ``N`` of the last row is
    folded into column ``N`` so every row sums to 1 exactly."""
    if int(N) != N or N < 3:
        raise ValueError(f"N must be an integer >= 3, got {N!r}")
    N = int(N)
    A = np.zeros((N, N))
    for k in range(1, N + 1):
        A[k - 1, :k] = 2.0 ** -np.arange(1, k + 1)
        if k < N:
            A[k - 1, k] = 2.0 ** -k
        else:
            A[k - 1, k - 1] += 2.0 ** -k
    return Example2Operator(N, A)


def example2_closed_form(n):
    """First ``n`` members of ``c_k - c_{k+1}``, ``c_k = 2^(-(k-1)k/2)``."""
    k = np.arange(1, n + 2, dtype=float)
    c = 2.0 ** (-(k - 1) * k / 2)
    return c[:-1] - c[1:]


def example2_limit_distribution(op, leading=10, tol=1e-8, **kwargs):
    """Stationary distribution of the truncation via :func:`limit_decomposition`.

    The first ``min(leading, N - 1)`` coordinates are compared with the
    closed form; :class:`HypothesisError` if they differ by more than ``tol``.
    """
    decomp = limit_decomposition(op.operator, **kwargs)
    f0 = decomp.f0
    k = min(leading, op.N - 1)
    err = float(np.max(np.abs(f0[:k] - example2_closed_form(k))))
    if err > tol:
        raise HypothesisError(
            f"limit distribution differs from the closed form by {err:.3e}"
        )
    return f0


@dataclass(frozen=True)
class EventualPositivity:
    n: int
    first_coordinate: float
    min_next: float
    min_after: float
    spread_after: float


def example2_eventual_positivity(op, n):
    """Check that ``A^n e_{n+2}`` has a zero first coordinate while
    ``A^(n+1) e_{n+2}`` and ``A^(n+2) e_{n+2}`` are strictly positive.

    ``n`` is 1-based like the basis index; requires ``n + 2 <= N - 1``.
    """
    if n < 1 or n + 2 > op.N - 1:
        raise ValueError(f"need 1 <= n and n + 2 <= N - 1 = {op.N - 1}")
    y = np.zeros(op.N)
    y[n + 1] = 1.0
    for _ in range(n):
        y = op.matrix @ y
    z = op.matrix @ y
    w = op.matrix @ z
    report = EventualPositivity(
        n=n, first_coordinate=float(y[0]), min_next=float(z.min()),
        min_after=float(w.min()), spread_after=float(w.max() - w.min()),
    )
    if report.first_coordinate != 0.0 or not report.min_next > 0 or not report.min_after > 0:
        raise HypothesisError(f"positivity pattern violated: {report}")
    return report


def example2_index_profile(op, upto=None):
    """``find_positivity_index`` for ``e_1 .. e_upto`` (default ``N - 1``)."""
    A = op.operator
    upto = op.N - 1 if upto is None else upto
    return [find_positivity_index(A, A.space.basis(j)) for j in range(upto)]


@dataclass(frozen=True, eq=False)
class KernelWalk:
    """Row-stochastic ``P`` on the states ``grid``; ``P0`` the limit measure."""

    grid: np.ndarray
    P: np.ndarray
    P0: np.ndarray = None


def kernel_walk(P, grid=None, atol=1e-12):
    P = np.array(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"P must be square, got shape {P.shape}")
    if np.any(P < 0) or np.max(np.abs(P.sum(axis=1) - 1)) > atol:
        raise ValueError("P must be row-stochastic")
    grid = np.arange(P.shape[0]) if grid is None else np.asarray(grid)
    return KernelWalk(grid, P)


def kernel_walk_from_density(density, grid):
    """Discretize ``P_s(dt) ~ density(s, t) dt`` on the nodes ``grid``."""
    grid = np.asarray(grid, dtype=float)
    K = np.array([[density(s, t) for t in grid] for s in grid], dtype=float)
    return kernel_walk(K / K.sum(axis=1, keepdims=True), grid)


def kernel_walk_convergence(kw, eps=1e-10, cap=100_000):
    """First ``n`` with ``max_s |P^n(s, .) - P0|_TV <= eps`` and the trace.

    The distance is the total variation norm of the signed measure,
    ``sum_t |P^n(s, t) - P0(t)|``.  Each state's row of ``P^n`` must become
    strictly positive eventually; otherwise :class:`RegularityError`.
    """
    P = kw.P
    PT = PositiveOperator.from_matrix(P.T)
    for s in range(P.shape[0]):
        if find_positivity_index(PT, PT.space.basis(s)) is None:
            raise RegularityError(
                f"row {s} of P^n never becomes positive", basis_index=s
            )
    P0 = kw.P0
    if P0 is None:
        P0 = limit_decomposition(P).f0
    R = np.eye(P.shape[0])
    trace = []
    for n in range(1, cap + 1):
        R = R @ P
        tv = float(np.max(np.sum(np.abs(R - P0[None, :]), axis=1)))
        trace.append((n, tv))
        if tv <= eps:
            return n, trace
    raise NotConvergedError(f"no convergence to {eps} within {cap} steps")
