"""Krylov/moment-matrix formulation: an independent oracle for small systems.

With K_V = [v1, Zv1, ...] and K_W = [w1, w2, Zw1, Zw2, ...] the moment
matrix M = K_W' K_V factors as L D U (no pivoting). Then V = K_V U^-1 holds
monic type II values, W = K_W (LD)^-T and W'V = I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import is_zero, lower_inverse, upper_inverse
from .errors import BreakdownError, ValidationError
from .krylov import KrylovOptions, iep_kryl, krylreorth_solve
from .model import BandedHessenberg, DiscreteSystem, StartingData, starting_vectors
from .scalar import EXTENDED, RATIONAL, Kind, get_kind, kind_of

__all__ = [
    "MomentMatrix", "krylov_basis_matrices", "moment_matrix", "ldu_factorize",
    "oracle_solve", "growth_factor", "reference_solve",
]


@dataclass
class MomentMatrix:
    entries: object
    provenance: str = ""


def krylov_basis_matrices(z, start: StartingData, m: int):
    k = start.kind
    z = k.asarray(z)
    N = len(z)
    if m > N:
        raise ValidationError("m must not exceed N")
    KV = k.zeros((N, m))
    KW = k.zeros((N, m))
    x = start.v1
    y1, y2 = start.w1, start.w2
    for j in range(m):
        KV[:, j] = x
        x = z * x
        if j % 2 == 0:
            KW[:, j] = y1
            y1 = z * y1
        else:
            KW[:, j] = y2
            y2 = z * y2
    return KV, KW


def moment_matrix(KW, KV) -> MomentMatrix:
    return MomentMatrix(KW.T @ KV, "K_W' K_V")


def ldu_factorize(M):
    """M = L diag(D) U with unit triangular L, U; returns (L, D, U), D as a vector."""
    A = M.entries if isinstance(M, MomentMatrix) else M
    k = kind_of(A)
    n = A.shape[0]
    L = k.eye(n)
    U = A.copy()
    for j in range(n):
        piv = U[j, j]
        if is_zero(k, piv):
            raise BreakdownError(f"moment matrix not strongly regular (leading minor {j + 1})", step=j + 1)
        for r in range(j + 1, n):
            L[r, j] = U[r, j] / piv
            U[r, j:] = U[r, j:] - L[r, j] * U[j, j:]
            U[r, j] = k.scalar(0)
    D = k.zeros(n)
    for j in range(n):
        D[j] = U[j, j]
    U = U / D[:, None]
    return L, D, U


def growth_factor(M) -> float:
    """max |entries| over all unpivoted elimination stages / max |M| (in double)."""
    A = np.array(kind_of(M).to_float(M.entries if isinstance(M, MomentMatrix) else M), dtype=float)
    base = np.abs(A).max()
    big = base
    n = A.shape[0]
    for j in range(n - 1):
        if A[j, j] == 0:
            return np.inf
        f = A[j + 1:, j] / A[j, j]
        A[j + 1:, j:] -= np.outer(f, A[j, j:])
        big = max(big, np.abs(A[j + 1:, j + 1:]).max())
    return float(big / base)


def oracle_solve(system: DiscreteSystem, kind=None):
    """(W, V, monic H) from the LDU factorization of the moment matrix."""
    k = get_kind(kind) if kind is not None else system.kind
    sysk = system.astype(k)
    st = starting_vectors(sysk)
    N = system.N
    KV, KW = krylov_basis_matrices(sysk.nodes, st, N)
    L, D, U = ldu_factorize(moment_matrix(KW, KV))
    V = KV @ upper_inverse(U, k)
    LD = L * D[None, :]
    W = KW @ lower_inverse(LD, k).T
    Hd = W.T @ (sysk.nodes[:, None] * V)
    if k is RATIONAL:
        H = BandedHessenberg.from_dense(Hd, check=True)
        if not H.monic:
            raise BreakdownError("oracle produced a non-monic recurrence")
        return W, V, H
    idx = np.arange(N)
    return W, V, BandedHessenberg(k.ones(N - 1), Hd[idx, idx], Hd[idx[:-1], idx[1:]],
                                  Hd[idx[:-2], idx[2:]], monic=True)


def reference_solve(system: DiscreteSystem, exact_limit: int = 40) -> BandedHessenberg:
    """Reference recurrence matrix used to measure forward errors.

    Rational systems up to ``exact_limit`` nodes are solved exactly (the
    short recurrences are cheap in exact arithmetic). Everything else is
    solved by fully reorthogonalized Lanczos in double-double, which stays
    accurate where the moment matrix is far too ill-conditioned.
    """
    if system.kind is RATIONAL and system.N <= exact_limit:
        _, H = iep_kryl(system.nodes, starting_vectors(system))
        return H
    sx = system.astype(EXTENDED)
    _, _, H = krylreorth_solve(sx.nodes, starting_vectors(sx), KrylovOptions("full", True))
    return H
