"""Dense positive operators on the orthant."""
from dataclasses import dataclass

import numpy as np

from .ordered_space import ConeSpace

__all__ = ["PositiveOperator", "as_operator", "op_norm"]


def op_norm(M):
    """Operator norm induced by the max norm (max absolute row sum)."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(M), axis=1)))


@dataclass(frozen=True, eq=False)
class PositiveOperator:
    """Entrywise nonnegative square matrix acting on a :class:`ConeSpace`.

    Parameters
    ----------
    space : ConeSpace
    matrix : array_like, shape (dim, dim)
    norm_bound : float, optional
        Certified ``sup_n |A^n|`` if known.
    """

    space: ConeSpace
    matrix: np.ndarray
    norm_bound: float = None

    def __post_init__(self):
        A = np.array(self.matrix, dtype=float)
        d = self.space.dim
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"matrix must be square, got shape {A.shape}")
        if A.shape != (d, d):
            raise ValueError(f"matrix has shape {A.shape}, space has dim {d}")
        if not np.all(np.isfinite(A)):
            i, j = np.argwhere(~np.isfinite(A))[0]
            raise ValueError(f"non-finite entry at ({i}, {j})")
        neg = np.argwhere(A < 0)
        if len(neg):
            i, j = neg[0]
            raise ValueError(
                f"negative entry {A[i, j]!r} at ({i}, {j}); operator is not positive"
            )
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @classmethod
    def from_matrix(cls, matrix, interior_tol=0.0, norm_bound=None):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"matrix must be square, got shape {matrix.shape}")
        return cls(ConeSpace(matrix.shape[0], interior_tol), matrix, norm_bound)

    @property
    def dim(self):
        return self.space.dim

    def __call__(self, x):
        return self.matrix @ self.space.vector(x)

    def power(self, n):
        """``A**n`` by repeated squaring."""
        return np.linalg.matrix_power(self.matrix, int(n))


def as_operator(A, interior_tol=0.0):
    """Accept either a :class:`PositiveOperator` or a raw square matrix."""
    if isinstance(A, PositiveOperator):
        return A
    return PositiveOperator.from_matrix(A, interior_tol=interior_tol)
