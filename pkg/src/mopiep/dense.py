"""Small dense kernels written with plain operators so every scalar kind works."""

from __future__ import annotations

import numpy as np

from .errors import EliminationError
from .scalar import DOUBLE, RATIONAL, Kind, kind_of


def is_zero(k: Kind, x) -> bool:
    return bool(k.is_zero(x)) if k is not DOUBLE else float(x) == 0.0


def unpivoted_lu(M, k: Kind | None = None, rel_tol: float | None = None, step=None):
    """M = L U with unit lower L; zero (or tiny) pivots raise EliminationError.

    ``rel_tol`` scales the threshold ``n * eps * ||M||_2``; ``0`` means exact-zero test only.
    """
    k = k or kind_of(M)
    n = M.shape[0]
    L = k.eye(n)
    U = M.copy()
    if k is RATIONAL or rel_tol == 0:
        thresh = 0.0
    else:
        thresh = (1.0 if rel_tol is None else rel_tol) * n * k.eps * float(np.linalg.norm(k.to_float(M), 2))
    for j in range(n):
        piv = U[j, j]
        if is_zero(k, piv) or abs(float(k.to_float(piv))) < thresh:
            raise EliminationError(f"unpivoted LU breakdown at leading minor {j + 1}", step=step)
        for r in range(j + 1, n):
            L[r, j] = U[r, j] / piv
            U[r, j:] = U[r, j:] - L[r, j] * U[j, j:]
            U[r, j] = k.scalar(0)
    return L, U


def upper_inverse(U, k: Kind | None = None):
    k = k or kind_of(U)
    n = U.shape[0]
    X = k.zeros((n, n))
    for j in range(n):
        X[j, j] = 1 / U[j, j]
        for i in range(j - 1, -1, -1):
            X[i, j] = -(U[i, i + 1:j + 1] @ X[i + 1:j + 1, j]) / U[i, i]
    return X


def lower_inverse(L, k: Kind | None = None):
    return upper_inverse(L.T.copy(), k).T.copy()


def solve(A, B, k: Kind | None = None):
    """Solve A X = B by Gaussian elimination with partial pivoting (B: n or n x m)."""
    k = k or kind_of(A)
    A = A.copy()
    X = B.copy()
    n = A.shape[0]
    vec = X.ndim == 1
    if vec:
        X = X.reshape(n, 1)
    for j in range(n):
        col = np.abs(k.to_float(A[j:, j]))
        if k is RATIONAL:
            p = j + next((i for i, v in enumerate(A[j:, j]) if v != 0), 0)
        else:
            p = j + int(np.argmax(col))
        if is_zero(k, A[p, j]):
            raise EliminationError(f"singular matrix at column {j + 1}")
        if p != j:
            A[[j, p], :] = A[[p, j], :]
            X[[j, p], :] = X[[p, j], :]
        piv = A[j, j]
        if j + 1 < n:
            f = A[j + 1:, j] / piv
            A[j + 1:, j:] = A[j + 1:, j:] - f[:, None] * A[j, j:][None, :]
            X[j + 1:, :] = X[j + 1:, :] - f[:, None] * X[j, :][None, :]
    for j in range(n - 1, -1, -1):
        if j + 1 < n:
            X[j, :] = X[j, :] - A[j, j + 1:] @ X[j + 1:, :]
        X[j, :] = X[j, :] / A[j, j]
    return X.reshape(n) if vec else X
