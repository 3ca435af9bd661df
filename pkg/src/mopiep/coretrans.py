"""Recurrence matrix by Gaussian-elimination core transformations.

Start from H = diag(z) with identity bases and the starting vectors in
coordinates. Each outer step introduces zeros at the bottom of the
transformed w1, w2 and v1 with lower eliminators, restores the pairing
W'V = I with an unpivoted LU of the small 3x3 coupling block and chases
the resulting bulges down and off the matrix. All transformations are
similarities ``H <- X^-1 H X``; the bases follow as ``W' <- X^-1 W'``,
``V <- V X``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dense import is_zero as _is_zero, unpivoted_lu, upper_inverse
from .errors import BreakdownError, EliminationError, ValidationError
from .krylov import monic_rescale
from .model import BandedHessenberg, StartingData
from .scalar import DOUBLE, RATIONAL, Kind, kind_of

__all__ = [
    "Eliminator", "CoreState", "make_eliminator", "lu_biorth_step",
    "chase_bulges", "iep_core",
]


@dataclass(frozen=True)
class Eliminator:
    """Unit triangular 2x2 core acting on positions ``index-1, index``."""

    kind: str
    index: int
    tau: object

    def matrix(self, k: Kind):
        E = k.eye(2)
        if self.kind == "lower":
            E[1, 0] = self.tau
        else:
            E[0, 1] = self.tau
        return E

    def inverse(self) -> "Eliminator":
        return Eliminator(self.kind, self.index, -self.tau)

    def apply(self, x):
        """Apply as a row operation to a vector (copy)."""
        y = x.copy()
        i = self.index
        if self.kind == "lower":
            y[i] = y[i] + self.tau * y[i - 1]
        else:
            y[i - 1] = y[i - 1] + self.tau * y[i]
        return y


def make_eliminator(kind: str, index: int, x) -> Eliminator:
    """Eliminator zeroing x[1] (lower, pivot x[0]) or x[0] (upper, pivot x[1])."""
    k = kind_of(x)
    a, b = x[0], x[1]
    if kind == "lower":
        if _is_zero(k, a):
            raise EliminationError("elimination pivot zero")
        return Eliminator(kind, index, -b / a)
    if kind == "upper":
        if _is_zero(k, b):
            raise EliminationError("elimination pivot zero")
        return Eliminator(kind, index, -a / b)
    raise ValidationError(f"unknown eliminator kind {kind!r}")


def lu_biorth_step(What, Vhat):
    """W_i = What L^-T, V_i = Vhat U^-1 from What'Vhat = LU (no pivoting)."""
    k = kind_of(What)
    L, U = unpivoted_lu(What.T @ Vhat, k)
    return What @ upper_inverse(L.T.copy(), k), Vhat @ upper_inverse(U, k)


# ---------------------------------------------------------------------------

@dataclass
class CoreState:
    """Working matrix, accumulated bases and transformed starting vectors.

    ``A`` holds W' (so W = A'), ``B`` holds V. ``w`` is N x 2 (w1, w2).
    """

    H: object
    A: object
    B: object
    w: object
    v: object
    step: int = 0

    @property
    def kind(self) -> Kind:
        return kind_of(self.H)

    def transform(self, s: int, X, Xi) -> None:
        """Similarity with X embedded at rows/cols s..s+m-1 (vectors not touched)."""
        m = X.shape[0]
        sl = slice(s, s + m)
        self.H[sl, :] = Xi @ self.H[sl, :]
        self.H[:, sl] = self.H[:, sl] @ X
        self.A[sl, :] = Xi @ self.A[sl, :]
        self.B[:, sl] = self.B[:, sl] @ X


def _bulges(H, k: Kind):
    """Out-of-band nonzeros, ordered: leftmost first, lower before upper."""
    N = H.shape[0]
    nz = (np.asarray(H) != 0) if k is DOUBLE else ~k.is_zero(H)
    i, j = np.indices((N, N))
    lower = nz & (i > j + 1)
    upper = nz & (j > i + 2)
    cand = []
    for p, q in zip(*np.nonzero(lower)):
        cand.append((q, 0, -p, p, q))
    for p, q in zip(*np.nonzero(upper)):
        cand.append((p, 1, -q, p, q))
    cand.sort()
    return cand


def chase_bulges(state: CoreState, step: int | None = None, max_sweeps: int | None = None) -> CoreState:
    """Remove all entries below the subdiagonal and above the second superdiagonal.

    Lower bulges are removed by a row eliminator on the two rows holding the
    entry and its pivot above it, upper bulges by a column eliminator on the
    two columns holding the entry and its pivot to its left.
    """
    H = state.H
    k = state.kind
    zero = k.scalar(0)
    N = H.shape[0]
    limit = max_sweeps or 4 * N * N
    for _ in range(limit):
        cand = _bulges(H, k)
        if not cand:
            return state
        _, low, _, p, q = cand[0]
        if low == 0:
            piv = H[p - 1, q]
            if _is_zero(k, piv):
                raise EliminationError(f"chase pivot zero at ({p}, {q})", step=step)
            tau = -H[p, q] / piv
            Xi = k.eye(2)
            Xi[1, 0] = tau
            X = k.eye(2)
            X[1, 0] = -tau
            s = p - 1
        else:
            piv = H[p, q - 1]
            if _is_zero(k, piv):
                raise EliminationError(f"chase pivot zero at ({p}, {q})", step=step)
            tau = -H[p, q] / piv
            X = k.eye(2)
            X[0, 1] = tau
            Xi = k.eye(2)
            Xi[0, 1] = -tau
            s = q - 1
        sl = slice(s, s + 2)
        state.w[sl, :] = X.T @ state.w[sl, :]
        state.v[sl] = Xi @ state.v[sl]
        state.transform(s, X, Xi)
        H[p, q] = zero
    raise EliminationError("bulge chase did not terminate", step=step)


def _lower_local(k: Kind, x, r: int):
    """3x3 lower eliminator on local rows r-1, r zeroing x[r]."""
    if _is_zero(k, x[r - 1]):
        raise EliminationError("elimination pivot zero")
    E = k.eye(3)
    E[r, r - 1] = -x[r] / x[r - 1]
    return E


def _lower_local_inv(E, r):
    Ei = E.copy()
    Ei[r, r - 1] = -E[r, r - 1]
    return Ei


def iep_core(z, start: StartingData, callback: Callable[[CoreState], None] | None = None):
    """Core-transformation solver; returns (W, V, monic BandedHessenberg).

    ``callback`` (if given) is called with the state after every outer step.
    """
    k = start.kind
    z = k.asarray(z)
    N = len(z)
    if N < 3:
        raise ValidationError("need N >= 3")
    zero = k.scalar(0)

    H = k.zeros((N, N))
    for i in range(N):
        H[i, i] = z[i]
    w = k.zeros((N, 2))
    w[:, 0] = start.w1
    w[:, 1] = start.w2
    state = CoreState(H, k.eye(N), k.eye(N), w, start.v1.copy())

    for i in range(1, N - 1):
        state.step = i
        q = N - i              # 1-based index of the w1 entry removed this step
        s = q - 2              # 0-based first row of the active 3x3 block
        sl = slice(s, s + 3)
        wl = state.w[sl, :].copy()
        vl = state.v[sl].copy()
        try:
            Gw = k.eye(3)
            Gwi = k.eye(3)
            elims = ([(0, 2)] if i == 1 else []) + [(0, 1), (1, 2)]
            for col, r in elims:
                E = _lower_local(k, wl[:, col], r)
                Gw = E @ Gw
                Gwi = Gwi @ _lower_local_inv(E, r)
                wl = E @ wl
                wl[r, col] = zero
            Gv = _lower_local(k, vl, 2)
            Gvi = _lower_local_inv(Gv, 2)
            vl = Gv @ vl
            vl[2] = zero
            L, U = unpivoted_lu(Gwi.T @ Gvi, k, step=i)
        except EliminationError as exc:
            exc.step = i
            raise
        Xi = U @ Gv
        X = Gvi @ upper_inverse(U, k)
        state.w[sl, :] = L.T @ wl
        state.v[sl] = U @ vl
        state.transform(s, X, Xi)
        chase_bulges(state, step=i)
        if callback is not None:
            callback(state)

    # last step: clear w2[0] with one eliminator on the first two rows
    state.step = N - 1
    w, v = state.w, state.v
    if _is_zero(k, w[1, 1]):
        raise EliminationError("elimination pivot zero", step=N - 1)
    tau = -w[0, 1] / w[1, 1]
    X = k.eye(2)
    X[1, 0] = tau
    Xi = k.eye(2)
    Xi[1, 0] = -tau
    w[0, :] = w[0, :] + tau * w[1, :]
    w[0, 1] = zero
    v[1] = zero  # v[1] - tau * v[0] vanishes since w2'v1 = 0
    state.transform(0, X, Xi)
    chase_bulges(state, step=N - 1)

    # scale so that v1 -> e1 and w2 -> e2 in the new coordinates
    if _is_zero(k, v[0]):
        raise EliminationError("zero leading entry of v1", step=N - 1)
    D = k.eye(2)
    D[0, 0] = v[0]
    D[1, 1] = 1 / w[1, 1]
    Di = k.eye(2)
    Di[0, 0] = 1 / v[0]
    Di[1, 1] = w[1, 1]
    w[:2, :] = D @ w[:2, :]
    v[:2] = Di @ v[:2]
    state.transform(0, D, Di)
    if callback is not None:
        callback(state)

    try:
        Hb = BandedHessenberg.from_dense(state.H, check=True, monic=False)
    except ValidationError as exc:
        raise EliminationError(str(exc), step=N - 1) from None
    H = monic_rescale(Hb)
    _check_d(H)
    return state.A.T, state.B, H


def _check_d(H: BandedHessenberg) -> None:
    """An exactly vanishing d_n means the step-line index is not normal.

    Only exact zeros are flagged: legitimate d_n can be ~1e-16 relative to
    the neighbouring entries, so no floating threshold separates the cases.
    """
    k = H.kind
    bad = np.nonzero(np.asarray(k.is_zero(H.super2)))[0]
    if len(bad):
        n = int(bad[0]) + 2
        raise BreakdownError(f"breakdown: d_{n} vanished (index not normal)", step=n)
