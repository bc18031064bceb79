r"""Oscillation of trajectories relative to a fixed order unit.

For a positive operator ``A`` with ``A u = u`` and a vector ``x`` put

.. math::

    M_x(n) = \max_i (A^n x)_i / u_i, \qquad
    m_x(n) = \min_i (A^n x)_i / u_i, \qquad
    \delta_x(n) = M_x(n) - m_x(n).

``M`` is nonincreasing, ``m`` nondecreasing, and for ``x >= 0`` the
trajectory is sandwiched, ``m_x(n) u <= A^n x <= M_x(n) u``.  When some power
``A^p`` maps every extreme element of the positive unit sphere strictly
inside the cone, the oscillation contracts geometrically,
``delta_x(kp) <= (1 - 2 beta)^k delta_x(0)``, and the common limit of
``m`` and ``M`` is the limit functional ``f0(x)``.
"""
import csv
import io
from dataclasses import dataclass

import numpy as np

from .exceptions import HypothesisError, NotConvergedError, NotFixedPointError
from .operator import as_operator
from .ordered_space import u_norm

__all__ = [
    "OscillationTrace",
    "RateCertificate",
    "check_fixed_point",
    "oscillation_step",
    "trace_until",
    "trace_basis",
    "limit_functional",
    "certify_rate",
]

FIXED_POINT_TOL = 1e-9
MONOTONE_SLACK = 1e-12
DELTA_FLOOR = 1e-14


def check_fixed_point(A, unit, tol=FIXED_POINT_TOL):
    """Raise :class:`NotFixedPointError` unless ``|Au - u|_u <= tol``."""
    A = as_operator(A)
    if A.dim != unit.dim:
        raise ValueError(f"operator dim {A.dim} != order unit dim {unit.dim}")
    residual = u_norm(unit, A.matrix @ unit.u - unit.u)
    if residual > tol:
        raise NotFixedPointError(
            f"order unit is not fixed by the operator: |Au - u|_u = {residual:.3e}"
        )
    return residual


@dataclass(frozen=True, eq=False)
class OscillationTrace:
    """Recorded ``(n, M, m)`` along the trajectory of ``x``."""

    x: np.ndarray
    unit: object
    n: np.ndarray
    M: np.ndarray
    m: np.ndarray
    converged: bool

    @property
    def delta(self):
        return self.M - self.m

    @property
    def steps(self):
        return list(zip(self.n.tolist(), self.M.tolist(), self.m.tolist()))

    @property
    def status(self):
        return "converged" if self.converged else "max_steps"

    @property
    def limit(self):
        """Midpoint of the final bracket ``[m, M]``."""
        return 0.5 * (self.M[-1] + self.m[-1])

    def to_csv(self, fh=None):
        """Write ``n,M,m,delta`` rows; returns the text if ``fh`` is None."""
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "M", "m", "delta"])
        for n, M, m, d in zip(self.n, self.M, self.m, self.delta):
            w.writerow([int(n), f"{M:.17g}", f"{m:.17g}", f"{d:.17g}"])
        if fh is None:
            return out.getvalue()


@dataclass(frozen=True)
class RateCertificate:
    """``delta_x(kp) <= (1 - 2 beta)**k * delta_x(0)``.

    ``delta0`` is the oscillation of the seed the certificate was issued
    for; 1.0 when issued per unit oscillation.
    """

    p: int
    beta: float
    delta0: float = 1.0

    @property
    def factor(self):
        return 1.0 - 2.0 * self.beta

    def bound(self, k, delta0=None):
        d0 = self.delta0 if delta0 is None else delta0
        return self.factor ** k * d0


def oscillation_step(A, unit, x, n, fixed_tol=FIXED_POINT_TOL):
    """Return ``(M_x(n), m_x(n))`` using ``n`` matrix-vector products."""
    A = as_operator(A)
    check_fixed_point(A, unit, fixed_tol)
    y = unit.space.vector(x)
    if n < 0:
        raise ValueError("n must be nonnegative")
    for _ in range(int(n)):
        y = A.matrix @ y
    r = y / unit.u
    return float(r.max()), float(r.min())


def _check_monotone(M, m, M_prev, m_prev, step):
    slack_M = MONOTONE_SLACK * np.maximum(1.0, np.abs(M_prev))
    slack_m = MONOTONE_SLACK * np.maximum(1.0, np.abs(m_prev))
    if np.any(M > M_prev + slack_M) or np.any(m < m_prev - slack_m):
        raise HypothesisError(
            f"oscillation bracket widened at step {step}; "
            "the order unit is probably not a fixed point"
        )


def _trace_columns(A, unit, X, eps, max_steps):
    """Trace all columns of ``X`` at once; returns (M, m, converged, steps)."""
    u = unit.u[:, None]
    Y = np.array(X, dtype=float)
    R = Y / u
    M_hist, m_hist = [R.max(axis=0)], [R.min(axis=0)]
    d0 = M_hist[0] - m_hist[0]
    target = np.maximum(eps * d0, DELTA_FLOOR)
    done = d0 <= target
    stop = np.where(done, 0, -1)
    n = 0
    while not np.all(done) and n < max_steps:
        n += 1
        Y = A @ Y
        R = Y / u
        M, m = R.max(axis=0), R.min(axis=0)
        _check_monotone(M, m, M_hist[-1], m_hist[-1], n)
        M_hist.append(M)
        m_hist.append(m)
        newly = ~done & (M - m <= target)
        stop[newly] = n
        done |= newly
    return np.array(M_hist), np.array(m_hist), stop


def trace_until(A, unit, x, eps=1e-10, max_steps=10_000, fixed_tol=FIXED_POINT_TOL):
    """Iterate ``A`` on ``x`` until ``delta_x(n) <= max(eps * delta_x(0), 1e-14)``.

    Stops at ``max_steps`` otherwise; the returned trace then has
    ``converged=False``.  A widening bracket raises :class:`HypothesisError`.
    """
    A = as_operator(A)
    check_fixed_point(A, unit, fixed_tol)
    x = unit.space.vector(x)
    M, m, stop = _trace_columns(A.matrix, unit, x[:, None], eps, max_steps)
    k = len(M) if stop[0] < 0 else stop[0] + 1
    return OscillationTrace(
        x=x, unit=unit, n=np.arange(k), M=M[:k, 0], m=m[:k, 0],
        converged=bool(stop[0] >= 0),
    )


def trace_basis(A, unit, eps=1e-12, max_steps=100_000, fixed_tol=FIXED_POINT_TOL):
    """Traces for every coordinate basis vector, computed as one batch."""
    A = as_operator(A)
    check_fixed_point(A, unit, fixed_tol)
    d = unit.dim
    M, m, stop = _trace_columns(A.matrix, unit, np.eye(d), eps, max_steps)
    traces = []
    for j in range(d):
        k = len(M) if stop[j] < 0 else stop[j] + 1
        traces.append(OscillationTrace(
            x=np.eye(d)[j], unit=unit, n=np.arange(k), M=M[:k, j], m=m[:k, j],
            converged=bool(stop[j] >= 0),
        ))
    return traces


def limit_functional(A, unit, basis_traces, tol=1e-9):
    """Assemble ``f0`` from converged traces of the basis vectors ``e_j``.

    ``f0_j`` is the midpoint of the final bracket of the ``e_j`` trace.
    Raises :class:`NotConvergedError` if any trace did not converge.
    """
    A = as_operator(A)
    d = unit.dim
    if len(basis_traces) != d:
        raise ValueError(f"need {d} basis traces, got {len(basis_traces)}")
    f0 = np.empty(d)
    for j, tr in enumerate(basis_traces):
        if not np.array_equal(tr.x, np.eye(d)[j]):
            raise ValueError(f"trace {j} is not seeded at basis vector e_{j}")
        if not tr.converged:
            raise NotConvergedError(
                f"trace of e_{j} did not converge "
                f"(oscillation {tr.delta[-1]:.3e} after {tr.n[-1]} steps)"
            )
        f0[j] = tr.limit
    if np.any(f0 < 0):
        raise HypothesisError("limit functional has negative components")
    total = float(f0 @ unit.u)
    if abs(total - 1.0) > tol:
        raise HypothesisError(f"limit functional has f0(u) = {total!r}, expected 1")
    return f0


def certify_rate(A, unit, p, x=None):
    """Contraction certificate for the oscillation at step ``p``.

    Every ``y >= 0`` with ``|y|_u = 1`` dominates some ``u_k e_k``, so
    ``(A^p y)_i / u_i >= beta = min_{i,k} u_k (A^p)_{ik} / u_i``.  This is
    the strong positivity bound that drives the contraction; values of
    ``beta >= 1/2`` are clamped to just below 1/2.

    Raises :class:`HypothesisError` if ``A^p`` has a zero entry, i.e. some
    basis vector is not mapped into the interior.
    """
    A = as_operator(A)
    if int(p) < 1:
        raise ValueError("p must be a positive integer")
    B = A.power(p)
    ratio = (B * unit.u[None, :]) / unit.u[:, None]
    beta = float(ratio.min())
    if not beta > 0:
        i, k = np.unravel_index(np.argmin(ratio), ratio.shape)
        raise HypothesisError(
            f"A^{p} is not strongly positive: zero ratio at row {i}, column {k}"
        )
    beta = min(beta, float(np.nextafter(0.5, 0.0)))
    delta0 = 1.0
    if x is not None:
        r = unit.ratios(x)
        delta0 = float(r.max() - r.min())
    return RateCertificate(p=int(p), beta=beta, delta0=delta0)
