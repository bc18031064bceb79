"""Positive semigroups ``S_t = exp(tG)`` generated by Metzler matrices.

A matrix with nonnegative off-diagonal entries generates a semigroup of
entrywise nonnegative matrices.  Long-run analysis reduces to the discrete
problem for the skeleton ``A = S_tau``; the decay of ``|S_t - A0|`` is
bounded through the oscillation of the images of the positive unit ball.
"""
import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import limit_decomposition
from .exceptions import UnboundedPowersError
from .operator import PositiveOperator, op_norm
from .ordered_space import ConeSpace

__all__ = [
    "Generator",
    "SemigroupLimit",
    "evaluate",
    "semigroup_limit",
    "remark2_bound",
    "positive_ball_vertices",
]

NEG_CLAMP = -1e-13
ROW_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Generator:
    """Metzler generator ``G``; ``row_sum_zero`` marks the Markov case."""

    space: ConeSpace
    G: np.ndarray
    row_sum_zero: bool = False

    def __post_init__(self):
        G = np.array(self.G, dtype=float)
        d = self.space.dim
        if G.shape != (d, d):
            raise ValueError(f"generator has shape {G.shape}, expected ({d}, {d})")
        if not np.all(np.isfinite(G)):
            raise ValueError("generator has non-finite entries")
        off = G - np.diag(np.diag(G))
        neg = np.argwhere(off < 0)
        if len(neg):
            i, j = neg[0]
            raise ValueError(
                f"negative off-diagonal entry {G[i, j]!r} at ({i}, {j}); "
                "generator is not Metzler"
            )
        if self.row_sum_zero:
            dev = np.max(np.abs(G.sum(axis=1)))
            if dev > ROW_SUM_TOL * max(1.0, np.max(np.abs(G))):
                raise ValueError(f"row sums deviate from zero by {dev:.3e}")
        G.setflags(write=False)
        object.__setattr__(self, "G", G)

    @classmethod
    def from_matrix(cls, G, row_sum_zero=None, interior_tol=0.0):
        G = np.asarray(G, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ValueError(f"generator must be square, got shape {G.shape}")
        if row_sum_zero is None:
            row_sum_zero = bool(
                np.max(np.abs(G.sum(axis=1)))
                <= ROW_SUM_TOL * max(1.0, np.max(np.abs(G)))
            )
        return cls(ConeSpace(G.shape[0], interior_tol), G, row_sum_zero)

    @property
    def dim(self):
        return self.space.dim


def _as_generator(G):
    return G if isinstance(G, Generator) else Generator.from_matrix(G)


def evaluate(gen, t):
    """``exp(t G)`` by scaling and squaring.

    ``G + sigma I`` is entrywise nonnegative for ``sigma = max(-diag G, 0)``,
    so every Taylor term of the shifted, scaled matrix is nonnegative and the
    result is positive up to rounding.  The series is truncated once a term
    falls below ``1e-17`` relative to the partial sum.
    """
    gen = _as_generator(gen)
    t = float(t)
    if t < 0 or not np.isfinite(t):
        raise ValueError(f"t must be finite and >= 0, got {t!r}")
    d = gen.dim
    if t == 0:
        return np.eye(d)
    sigma = max(0.0, float(-np.min(np.diag(gen.G))))
    X = t * (gen.G + sigma * np.eye(d))
    nrm = op_norm(X)
    k = 0 if nrm <= 0.5 else int(math.ceil(math.log2(nrm / 0.5)))
    s = t / 2 ** k
    X = X / 2 ** k
    E = np.eye(d)
    term = np.eye(d)
    for j in range(1, 200):
        term = term @ X / j
        E = E + term
        if op_norm(term) <= 1e-17 * op_norm(E):
            break
    E *= math.exp(-sigma * s)
    for _ in range(k):
        E = E @ E
    if not np.all(np.isfinite(E)):
        raise OverflowError(f"exp(tG) overflows at t = {t!r}")
    worst = float(np.min(E))
    if worst < 0:
        if worst < NEG_CLAMP:
            warnings.warn(f"exp(tG) has entry {worst:.3e} < {NEG_CLAMP}; clamped to 0")
        E = np.maximum(E, 0.0)
    return E


def positive_ball_vertices(dim, limit=12, n_random=32, seed=0):
    """Test vectors for the positive part of the unit ball.

    For ``dim <= limit`` these are all nonzero 0/1 vectors, the vertices of
    ``{0 <= x <= 1}``; a convex function attains its maximum over the ball
    at one of them.  Beyond that the basis vectors plus ``n_random`` random
    vectors of max-norm 1 are used.  Returns ``(V, kind)`` with the vectors
    as columns and ``kind`` either ``"exact"`` or ``"sampled"``.
    """
    if dim <= limit:
        cols = [np.array(bits, dtype=float)
                for bits in itertools.product((0.0, 1.0), repeat=dim) if any(bits)]
        return np.array(cols).T, "exact"
    rng = np.random.default_rng(seed)
    R = rng.random((dim, n_random))
    R /= R.max(axis=0)
    return np.hstack([np.eye(dim), R]), "sampled"


@dataclass(frozen=True, eq=False)
class SemigroupLimit:
    """Limit of ``S_t`` with the decay record ``(t, bound, actual)``."""

    decomp: object
    tau: float
    bound_trace: list = field(default_factory=list)
    sample: np.ndarray = None
    sample_kind: str = "exact"
    seed: int = 0
    residuals: dict = field(default_factory=dict)

    def trace_csv(self):
        lines = ["t,bound,actual"]
        for t, b, a in self.bound_trace:
            lines.append(f"{t:.17g},{b:.17g},{a:.17g}")
        return "\n".join(lines) + "\n"


def _oscillation_max(Z, u):
    R = Z / u[:, None]
    return float(np.max(R.max(axis=0) - R.min(axis=0)))


def remark2_bound(gen, lim, t, tau=None):
    """``2 gamma C_u max_y (M_y(t - tau) - m_y(t - tau))`` over ``y = S_tau v``.

    ``v`` ranges over ``lim.sample`` (see :func:`positive_ball_vertices`).
    The result dominates ``|S_t - A0|`` whenever the sample contains every
    vertex of the positive unit ball.
    """
    gen = _as_generator(gen)
    tau = lim.tau if tau is None else float(tau)
    if not t > tau:
        raise ValueError(f"need t > tau, got t = {t!r}, tau = {tau!r}")
    if lim.decomp.is_zero_limit:
        raise ValueError("bound needs a nonzero limit")
    unit = lim.decomp.unit
    Y = evaluate(gen, tau) @ lim.sample
    Z = evaluate(gen, t - tau) @ Y
    return 2.0 * unit.gamma * unit.C_u * _oscillation_max(Z, unit.u)


def semigroup_limit(gen, tau=1.0, horizon=None, eps=1e-12, cap=None,
                    n_random=32, seed=0, vertex_limit=12, max_doublings=40):
    """Limit of ``exp(tG)`` through the skeleton ``A = exp(tau G)``.

    The time grid is ``t = tau * 2^k``, ``k = 1..max_doublings``, stopping
    early when the bound drops below ``1e-12`` or ``t`` exceeds ``horizon``.

    Raises
    ------
    RegularityError
        ``S_tau`` does not push every basis vector into the interior.
    UnboundedPowersError
        Sampled ``|S_t|`` exceed ``C_u^2``.
    """
    gen = _as_generator(gen)
    tau = float(tau)
    if not tau > 0:
        raise ValueError("tau must be positive")
    A = PositiveOperator(gen.space, evaluate(gen, tau))
    decomp = limit_decomposition(A, eps=eps, cap=cap)
    V, kind = positive_ball_vertices(gen.dim, vertex_limit, n_random, seed)
    if decomp.is_zero_limit:
        return SemigroupLimit(decomp, tau, [], V, kind, seed)

    unit = decomp.unit
    A0 = decomp.A0
    bound_C = unit.C_u ** 2 * (1 + 1e-9)
    comm = 0.0
    trace = []
    Y = A.matrix @ V
    for k in range(0, max_doublings + 1):
        t = tau * 2 ** k
        if horizon is not None and t > horizon and k > 1:
            break
        S = evaluate(gen, t)
        if op_norm(S) > bound_C:
            raise UnboundedPowersError(
                f"|S_t| = {op_norm(S):.6g} at t = {t:g} exceeds C_u^2 = {unit.C_u ** 2:.6g}"
            )
        comm = max(comm, op_norm(S @ A0 - A0), op_norm(A0 @ S - A0))
        if k == 0:
            continue
        Z = evaluate(gen, t - tau) @ Y
        bound = 2.0 * unit.gamma * unit.C_u * _oscillation_max(Z, unit.u)
        trace.append((t, bound, op_norm(S - A0)))
        if bound < 1e-12:
            break
    residuals = {"commutation": comm}
    if gen.row_sum_zero:
        residuals["stationarity"] = float(np.max(np.abs(decomp.f0 @ gen.G)))
    return SemigroupLimit(decomp, tau, trace, V, kind, seed, residuals)
