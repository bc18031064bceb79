r"""Order structure of the nonnegative orthant in :math:`\mathbb{R}^d`.

The background norm is the max norm.  With an interior vector ``u`` the
order-unit norm is

.. math::  \|x\|_u = \inf\{\lambda \ge 0 : -\lambda u \le x \le \lambda u\}
                   = \max_i |x_i| / u_i,

and the positive functionals taking the value 1 at ``u`` form the convex
hull of the scaled coordinate functionals :math:`e_i / u_i`.  All sup/inf
over that set therefore reduce to a max/min over ``d`` numbers.
"""
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConeSpace",
    "OrderUnit",
    "DualBase",
    "dual_base",
    "in_cone",
    "in_interior",
    "u_norm",
    "nonflat_decompose",
    "order_le",
]


@dataclass(frozen=True)
class ConeSpace:
    """Real coordinate space of dimension ``dim`` ordered by the orthant.

    ``interior_tol`` is relative: ``x`` is interior iff
    ``min(x) > interior_tol * max(1, max|x|)``.  Zero means a strict sign test.
    """

    dim: int
    interior_tol: float = 0.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        if not self.interior_tol >= 0:
            raise ValueError(f"interior_tol must be >= 0, got {self.interior_tol!r}")

    def vector(self, x, name="x"):
        """Return ``x`` as a float vector, checking its length."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(
                f"{name} has shape {x.shape}, expected ({self.dim},)"
            )
        return x

    def basis(self, j):
        e = np.zeros(self.dim)
        e[j] = 1.0
        return e


def in_cone(space, x):
    """True iff every component of ``x`` is >= 0 (no tolerance)."""
    x = space.vector(x)
    return bool(np.all(x >= 0.0))


def in_interior(space, x):
    """True iff ``x`` is strictly positive relative to ``space.interior_tol``."""
    x = space.vector(x)
    scale = max(1.0, float(np.max(np.abs(x))))
    return bool(np.min(x) > space.interior_tol * scale)


@dataclass(frozen=True, eq=False)
class OrderUnit:
    """An interior vector ``u`` and the constants it induces.

    Attributes
    ----------
    C_u : float
        Equivalence constant, ``C_u**-1 * |x|_max <= |x|_u <= C_u * |x|_max``.
        For the max norm this is ``max(max(u), 1 / min(u))``.
    gamma : float
        Nonflatness constant of the orthant in the max norm (always 1: the
        positive and negative parts of ``x`` have norm at most ``|x|``).
    """

    space: ConeSpace
    u: np.ndarray
    C_u: float = field(init=False)
    gamma: float = field(init=False, default=1.0)

    def __post_init__(self):
        u = self.space.vector(self.u, "u").copy()
        if not np.all(np.isfinite(u)):
            raise ValueError("order unit has non-finite entries")
        if np.min(u) <= self.space.interior_tol * np.max(u) or np.min(u) <= 0:
            raise ValueError("order unit must be strictly interior")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "C_u", float(max(np.max(u), 1.0 / np.min(u))))

    @classmethod
    def ones(cls, dim, interior_tol=0.0):
        return cls(ConeSpace(dim, interior_tol), np.ones(dim))

    @property
    def dim(self):
        return self.space.dim

    def ratios(self, x):
        """Values of the extreme dual functionals at ``x``, i.e. ``x / u``."""
        return self.space.vector(x) / self.u


@dataclass(frozen=True, eq=False)
class DualBase:
    """Extreme points of ``{f >= 0 : f(u) = 1}``, one per row."""

    unit: OrderUnit
    extreme_points: np.ndarray

    def evaluate(self, x):
        """All extreme functionals applied to ``x`` (vector of length dim)."""
        return self.extreme_points @ self.unit.space.vector(x)


def dual_base(unit):
    return DualBase(unit, np.diag(1.0 / unit.u))


def u_norm(unit, x):
    """Order-unit norm ``max_i |x_i| / u_i``."""
    return float(np.max(np.abs(unit.ratios(x))))


def nonflat_decompose(unit, x):
    """Split ``x`` into positive and negative parts.

    Returns ``(x1, x2)`` with ``x1, x2 >= 0``, ``x = x1 - x2`` and
    ``|x_k| <= unit.gamma * |x|`` in the max norm.
    """
    x = unit.space.vector(x)
    return np.maximum(x, 0.0), np.maximum(-x, 0.0)


def order_le(unit, x, y):
    """``x <= y`` tested through the dual base (equivalent to componentwise)."""
    base = dual_base(unit)
    return bool(np.all(base.evaluate(x) <= base.evaluate(y)))
