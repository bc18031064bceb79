"""Long-run behaviour of the iterates ``A^n`` of a positive matrix.

For a regular positive ``A`` (every nonzero ``x >= 0`` has some ``A^n x``
strictly positive) whose powers stay bounded, either ``A^n -> 0`` or there
are an interior fixed vector ``u`` and a positive functional ``f0`` with
``f0 A = f0``, ``f0(u) = 1`` and ``A^n -> A0 = u f0`` in norm.  This module
computes that decomposition, checks the algebraic identities of ``A0`` and
sums the series for ``(I - A + A0)^{-1}``.
"""
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    HypothesisError,
    MultipleFixedPointsError,
    NotConvergedError,
    RegularityError,
    SpectralRadiusError,
    UnboundedPowersError,
)
from .operator import PositiveOperator, as_operator, op_norm
from .ordered_space import ConeSpace, OrderUnit, in_cone, in_interior
from .oscillation import (
    RateCertificate,
    certify_rate,
    limit_functional,
    trace_basis,
    FIXED_POINT_TOL,
)

__all__ = [
    "PositiveOperator",
    "LimitDecomposition",
    "FundamentalInverse",
    "find_positivity_index",
    "find_uniform_index",
    "perron_vector",
    "normalize_spectral_radius",
    "limit_decomposition",
    "check_simple_eigenvalue",
    "corollary1_check",
    "fundamental_inverse",
]

ZERO_LIMIT_TOL = 1e-12


def default_cap(dim):
    # Wielandt: a primitive d x d matrix has A^p > 0 for some p <= (d-1)^2 + 1.
    return dim * dim + 1


def _interior_columns(space, B):
    return all(in_interior(space, B[:, j]) for j in range(B.shape[1]))


def find_positivity_index(A, x, cap=None):
    """Smallest ``n >= 1`` with ``A^n x`` in the interior, or None.

    The search stops at ``cap`` (default ``dim**2 + 1``) or as soon as the
    zero pattern of the iterate repeats, which means it cycles forever.
    """
    A = as_operator(A)
    x = A.space.vector(x)
    if not in_cone(A.space, x):
        raise ValueError("x must lie in the cone")
    if not np.any(x > 0):
        raise ValueError("x must be nonzero")
    cap = default_cap(A.dim) if cap is None else int(cap)
    structural = A.space.interior_tol == 0
    seen = set()
    y = x
    for n in range(1, cap + 1):
        y = A.matrix @ y
        if in_interior(A.space, y):
            return n
        if structural:
            key = (y > 0).tobytes()
            if key in seen:
                return None
            seen.add(key)
        scale = np.max(y)
        if scale == 0:
            return None
        if structural and (scale > 1e150 or scale < 1e-150):
            y = y / scale
    return None


def find_uniform_index(A, cap=None):
    """Smallest ``p`` with ``A^p`` strictly positive (every column interior).

    Uses binary lifting over ``A^(2^k)``; positivity of ``A^p`` implies that
    of every higher power, so the predicate is monotone.
    """
    A = as_operator(A)
    cap = default_cap(A.dim) if cap is None else int(cap)
    space = A.space
    structural = space.interior_tol == 0

    def rescale(B):
        s = np.max(B)
        return B / s if structural and s > 0 else B

    if _interior_columns(space, A.matrix):
        return 1
    powers = [A.matrix]
    while (1 << (len(powers) - 1)) < cap:
        P = rescale(powers[-1] @ powers[-1])
        powers.append(P)
        if _interior_columns(space, P):
            break
    else:
        return None
    if not _interior_columns(space, powers[-1]):
        return None
    cur = np.eye(A.dim)
    p = 0
    for k in range(len(powers) - 2, -1, -1):
        cand = rescale(cur @ powers[k])
        if not _interior_columns(space, cand):
            cur = cand
            p += 1 << k
    p += 1
    return p if p <= cap else None


def perron_vector(A, p=1, tol=1e-14, max_iter=5000):
    """Dominant eigenpair of a positive matrix with ``A^p`` strictly positive.

    Power iteration on ``B = A^p``, squaring ``B`` whenever progress stalls.
    The Collatz-Wielandt bracket ``min(Bv/v) <= rho(B) <= max(Bv/v)`` is the
    stopping rule.  Returns ``(rho, v, (rho_lo, rho_hi))`` with ``max(v) = 1``
    and the bracket computed for ``A`` itself.
    """
    A = as_operator(A)
    B = A.power(p)
    B = B / np.max(B)
    v = np.ones(A.dim)
    best = np.inf
    since_best = 0
    for it in range(max_iter):
        w = B @ v
        r = w / v
        lo, hi = r.min(), r.max()
        width = (hi - lo) / hi
        v = w / np.max(w)
        if width <= tol:
            break
        if width < best * 0.5:
            best, since_best = width, 0
        else:
            since_best += 1
        if since_best >= 8:
            if best <= 1e-10 and since_best >= 64:
                break
            B = B @ B
            B = B / np.max(B)
    else:
        raise NotConvergedError("power iteration did not converge")
    r = (A.matrix @ v) / v
    lo, hi = float(r.min()), float(r.max())
    return 0.5 * (lo + hi), v, (lo, hi)


def normalize_spectral_radius(A):
    """Return ``(A / rho, rho)``.  Preprocessing only; never applied silently."""
    A = as_operator(A)
    p = find_uniform_index(A)
    if p is None:
        raise RegularityError("no power of the operator is strongly positive")
    rho, _, _ = perron_vector(A, p)
    if rho <= 0:
        raise SpectralRadiusError("spectral radius is zero", rho=rho)
    return PositiveOperator(A.space, A.matrix / rho), rho


@dataclass(frozen=True, eq=False)
class LimitDecomposition:
    """Limit of ``A^n``: either zero or the rank-one ``A0 = u f0``."""

    is_zero_limit: bool
    A0: np.ndarray
    u: np.ndarray = None
    f0: np.ndarray = None
    certificate: RateCertificate = None
    rho: float = None
    positivity_indices: tuple = ()
    uniform_index: int = None
    residuals: dict = field(default_factory=dict)

    @property
    def unit(self):
        return None if self.u is None else _unit(self.u)

    def to_dict(self):
        d = {
            "zero_limit": bool(self.is_zero_limit),
            "u": None if self.u is None else self.u.tolist(),
            "f0": None if self.f0 is None else self.f0.tolist(),
            "A0": self.A0.tolist(),
            "certificate": None if self.certificate is None else {
                "p": self.certificate.p, "beta": self.certificate.beta,
            },
            "residuals": dict(self.residuals),
        }
        return d


def _unit(u):
    return OrderUnit(ConeSpace(len(u)), u)


def _sampled_power_norms(A, p, kmax):
    """``(n, |A^n|)`` at ``n = p * 2^k`` for ``k = 0..kmax``."""
    Q = A.power(p)
    out = [(p, op_norm(Q))]
    for k in range(1, kmax + 1):
        Q = Q @ Q
        nrm = op_norm(Q)
        out.append((p << k, nrm))
        if not np.isfinite(nrm) or nrm == 0:
            break
    return out


def limit_decomposition(A, eps=1e-13, cap=None, rho_tol=1e-9,
                        fixed_tol=FIXED_POINT_TOL, max_steps=100_000):
    """Compute the limit of ``A^n`` for a regular, power-bounded ``A``.

    Parameters
    ----------
    A : PositiveOperator or array_like
    eps : float
        Relative oscillation tolerance for the basis traces that give ``f0``.
    cap : int, optional
        Search cap for positivity indices (default ``dim**2 + 1``).
    rho_tol : float
        Allowed distance of the dominant eigenvalue from 1.

    Raises
    ------
    RegularityError
        Some basis vector never reaches the interior.
    UnboundedPowersError
        Sampled ``|A^n|`` grow.
    SpectralRadiusError
        Dominant eigenvalue below 1 but powers that do not vanish.
    """
    A = as_operator(A)
    d = A.dim
    indices = []
    for j in range(d):
        n = find_positivity_index(A, A.space.basis(j), cap)
        if n is None:
            raise RegularityError(
                f"regularity condition 1 fails at basis vector {j + 1}",
                basis_index=j,
            )
        indices.append(n)
    p = find_uniform_index(A, cap)
    if p is None:
        raise RegularityError("no power of the operator is strongly positive")

    rho, v, (rho_lo, rho_hi) = perron_vector(A, p)
    if rho > 1 + rho_tol:
        raise UnboundedPowersError(
            f"dominant eigenvalue {rho:.12g} > 1: powers of the operator diverge"
        )
    if rho < 1 - rho_tol:
        norms = _sampled_power_norms(A, p, 64)
        vals = [nrm for _, nrm in norms]
        decreasing = all(b <= a for a, b in zip(vals[-3:], vals[-2:]))
        if vals[-1] < ZERO_LIMIT_TOL and decreasing:
            return LimitDecomposition(
                is_zero_limit=True, A0=np.zeros((d, d)), rho=rho,
                positivity_indices=tuple(indices), uniform_index=p,
                residuals={"final_power_norm": vals[-1], "final_power": norms[-1][0]},
            )
        raise SpectralRadiusError(
            f"dominant eigenvalue {rho:.12g} != 1 and powers do not vanish", rho=rho
        )

    u = v / np.max(v)
    unit = _unit(u)
    bound = unit.C_u ** 2
    for n, nrm in _sampled_power_norms(A, p, 16):
        if not nrm <= bound * (1 + 1e-9):
            raise UnboundedPowersError(
                f"|A^{n}| = {nrm:.6g} exceeds the bound C_u^2 = {bound:.6g}"
            )

    traces = trace_basis(A, unit, eps=eps, max_steps=max_steps, fixed_tol=fixed_tol)
    f0 = limit_functional(A, unit, traces)
    f0 = f0 / float(f0 @ u)
    A0 = np.outer(u, f0)
    cert = certify_rate(A, unit, p)
    N = max(len(t.n) for t in traces) - 1
    final = op_norm(A.power(max(N, 1)) - A0)
    residuals = {
        "fixed_point": float(np.max(np.abs(A.matrix @ u - u) / u)),
        "adjoint_fixed_point": float(np.max(np.abs(f0 @ A.matrix - f0))),
        "final_power": int(max(N, 1)),
        "final_power_norm": final,
    }
    return LimitDecomposition(
        is_zero_limit=False, A0=A0, u=u, f0=f0, certificate=cert, rho=rho,
        positivity_indices=tuple(indices), uniform_index=p, residuals=residuals,
    )


@dataclass(frozen=True)
class SimpleEigenvalueReport:
    nullity: int
    adjoint_nullity: int
    fixed_residual: float
    adjoint_residual: float


def check_simple_eigenvalue(A, decomp=None, tol=1e-9):
    """Nullity of ``A - I`` (must be 1) and consistency of the fixed vectors.

    Any fixed vector ``u'`` must equal ``f0(u') u``; any fixed functional
    ``g`` must equal ``g(u) f0``.  Raises :class:`MultipleFixedPointsError`
    when the nullity exceeds 1.
    """
    A = as_operator(A)
    d = A.dim
    U, s, Vh = np.linalg.svd(A.matrix - np.eye(d))
    thresh = tol * max(1.0, s[0])
    nullity = int(np.sum(s <= thresh))
    if nullity > 1:
        raise MultipleFixedPointsError(
            f"eigenvalue 1 has geometric multiplicity {nullity}", nullity=nullity
        )
    fixed_res = adj_res = float("nan")
    if nullity == 1 and decomp is not None and not decomp.is_zero_limit:
        u, f0 = decomp.u, decomp.f0
        w = Vh[-1]
        fixed_res = float(np.max(np.abs(w - (f0 @ w) * u)) / np.max(np.abs(w)))
        g = U[:, -1]
        adj_res = float(np.max(np.abs(g - (g @ u) * f0)) / np.max(np.abs(g)))
    return SimpleEigenvalueReport(nullity, nullity, fixed_res, adj_res)


def corollary1_check(A, decomp, n):
    """Residual norms of ``A0^n = A0``, ``A A0 = A0 A = A0`` and
    ``(A - A0)^n = A^n - A0``."""
    A = as_operator(A)
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    A0 = decomp.A0
    M = A.matrix
    return {
        "idempotent": op_norm(np.linalg.matrix_power(A0, n) - A0),
        "left": op_norm(M @ A0 - A0),
        "right": op_norm(A0 @ M - A0),
        "power": op_norm(
            np.linalg.matrix_power(M - A0, n) - (np.linalg.matrix_power(M, n) - A0)
        ),
    }


@dataclass(frozen=True, eq=False)
class FundamentalInverse:
    T_inv: np.ndarray
    terms_used: int
    residual: float


def fundamental_inverse(A, decomp, eps=1e-13, window=None, max_terms=1_000_000):
    """Invert ``T = I - A + A0`` by the series ``I + sum_{n>=1} (A^n - A0)``.

    The terms are formed as ``(A - A0)^n``, which equals ``A^n - A0`` but
    does not stall at the rounding error of ``A0``.  Summation stops after
    the first term with norm below ``eps``.
    """
    A = as_operator(A)
    d = A.dim
    A0 = decomp.A0
    U = A.matrix - A0
    p = decomp.certificate.p if decomp.certificate else (decomp.uniform_index or 1)
    window = 8 * p if window is None else int(window)
    S = np.eye(d)
    term = np.eye(d)
    checkpoint = np.inf
    n = 0
    while True:
        n += 1
        term = term @ U
        S += term
        nrm = op_norm(term)
        if nrm < eps:
            break
        if n % window == 0:
            if not nrm < checkpoint:
                raise HypothesisError(
                    f"series terms stopped decreasing (|term {n}| = {nrm:.3e})"
                )
            checkpoint = nrm
        if n >= max_terms:
            raise NotConvergedError(f"series did not converge in {max_terms} terms")
    T = np.eye(d) - U
    residual = max(op_norm(T @ S - np.eye(d)), op_norm(S @ T - np.eye(d)))
    if decomp.certificate is not None:
        gap = 2 * decomp.certificate.beta
    else:
        gap = max(1.0 - (decomp.rho or 0.0), 1e-3)
    tol = max(d * eps / gap, 1e-9) * max(1.0, op_norm(S))
    if residual > tol:
        raise NotConvergedError(f"T T^-1 - I has norm {residual:.3e} > {tol:.3e}")
    return FundamentalInverse(S, n, residual)
