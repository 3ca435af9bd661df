"""Biorthogonal Lanczos with two left starting vectors.

``iep_kryl`` is the short-recurrence version that directly produces monic
type II values in ``V``. ``iep_krylreorth`` keeps unit-norm vectors,
orthogonalizes against a window (``partial``) or all previous vectors
(``full``) and optionally repeats the pass once; the banded recurrence
matrix is recovered afterwards by truncation and two diagonal rescalings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BreakdownError, ValidationError
from .model import BandedHessenberg, StartingData
from .scalar import RATIONAL, Kind, kind_of

__all__ = [
    "BiorthogonalPair", "KrylovOptions", "iep_kryl", "iep_krylreorth",
    "truncate_bandwidth", "biorthogonal_rescale", "monic_rescale",
    "normalize_start", "krylreorth_solve",
]


@dataclass
class BiorthogonalPair:
    V: object
    W: object
    sigma: object


@dataclass(frozen=True)
class KrylovOptions:
    strategy: str = "full"
    reorthogonalize: bool = True
    breakdown_tol: float | None = None

    def __post_init__(self):
        if self.strategy not in ("partial", "full"):
            raise ValidationError(f"unknown strategy {self.strategy!r}")
        if self.breakdown_tol is not None and self.breakdown_tol < 0:
            raise ValidationError("breakdown_tol must be nonnegative")


def _default_tol(k: Kind, tol):
    return 1e3 * k.eps if tol is None else tol


def _negligible(k: Kind, x, scale, tol) -> bool:
    """|x| <= tol * scale; an exact zero test for rationals."""
    if k is RATIONAL:
        return x == 0 or abs(x) <= tol * scale
    return abs(float(k.to_float(x))) <= tol * float(k.to_float(scale))


# ---------------------------------------------------------------------------

def iep_kryl(z, start: StartingData, breakdown_tol: float | None = None):
    """Short recurrences; returns (BiorthogonalPair, monic BandedHessenberg)."""
    k = start.kind
    z = k.asarray(z)
    N = len(z)
    if N < 3:
        raise ValidationError("need N >= 3")
    tol = _default_tol(k, breakdown_tol)

    V = k.zeros((N, N))
    W = k.zeros((N, N))
    b = k.zeros(N)
    c = k.zeros(N - 1)   # c[n-1] = c_n
    d = k.zeros(N - 2)   # d[n-2] = d_n
    v1, w1, w2 = start.v1, start.w1, start.w2
    V[:, 0] = v1
    W[:, 0] = w1
    W[:, 1] = w2

    zv = z * v1
    b[0] = w1 @ zv
    v = zv - b[0] * v1
    V[:, 1] = v
    zv = z * v
    b[1] = w2 @ zv
    c[0] = w1 @ zv
    v = zv - b[1] * v - c[0] * v1
    V[:, 2] = v
    zw = z * w1
    wh = zw - c[0] * w2 - b[0] * w1
    d_n = w1 @ (z * v)
    if _negligible(k, d_n, k.norm(zw), tol):
        raise BreakdownError("breakdown: d_2 vanished", step=2)
    d[0] = d_n
    W[:, 2] = wh / d_n

    for n in range(3, N):
        # 1-based: v_n = V[:, n-1], w_n = W[:, n-1]
        vn = V[:, n - 1]
        zv = z * vn
        b[n - 1] = W[:, n - 1] @ zv
        c[n - 2] = W[:, n - 2] @ zv
        v = zv - b[n - 1] * vn - c[n - 2] * V[:, n - 2] - d[n - 3] * V[:, n - 3]
        V[:, n] = v
        zw = z * W[:, n - 2]
        wh = zw - c[n - 2] * W[:, n - 1] - b[n - 2] * W[:, n - 2] - W[:, n - 3]
        d_n = W[:, n - 2] @ (z * v)
        if _negligible(k, d_n, k.norm(zw), tol):
            raise BreakdownError(f"breakdown: d_{n} vanished", step=n)
        d[n - 2] = d_n
        W[:, n] = wh / d_n

    zv = z * V[:, N - 1]
    b[N - 1] = W[:, N - 1] @ zv
    c[N - 2] = W[:, N - 2] @ zv

    H = BandedHessenberg(k.ones(N - 1), b, c, d, monic=True)
    return BiorthogonalPair(V, W, k.ones(N)), H


# ---------------------------------------------------------------------------

def normalize_start(start: StartingData) -> StartingData:
    """Unit-norm copies of w1, w2, v1 (the d's are kept)."""
    k = start.kind
    return StartingData(start.w1 / k.norm(start.w1), start.w2 / k.norm(start.w2),
                        start.v1 / k.norm(start.v1), start.d1, start.d2, start.d3)


def iep_krylreorth(z, start: StartingData, opts: KrylovOptions = KrylovOptions()):
    """Normalized biorthogonal Lanczos; returns (pair, H_V, H_W) with dense H_V, H_W.

    ``start`` must hold unit-norm vectors (see :func:`normalize_start`).
    """
    k = start.kind
    z = k.asarray(z)
    N = len(z)
    if N < 3:
        raise ValidationError("need N >= 3")
    tol = _default_tol(k, opts.breakdown_tol)
    passes = 2 if opts.reorthogonalize else 1

    V = k.zeros((N, N))
    W = k.zeros((N, N))
    HV = k.zeros((N, N))
    HW = k.zeros((N, N))
    s = k.zeros(N)
    v1, w1, w2 = start.v1, start.w1, start.w2
    V[:, 0] = v1
    W[:, 0] = w1
    W[:, 1] = w2
    s[0] = w1 @ v1
    if _negligible(k, s[0], 1, tol):
        raise BreakdownError("w1'v1 vanished", step=1)

    zv = z * v1
    HV[0, 0] = (w1 @ zv) / s[0]
    vh = zv - HV[0, 0] * v1
    nrm = k.norm(vh)
    if _negligible(k, nrm, k.norm(zv), tol):
        raise BreakdownError("Krylov space exhausted at step 2", step=2)
    HV[1, 0] = nrm
    V[:, 1] = vh / nrm
    s[1] = w2 @ V[:, 1]
    if _negligible(k, s[1], 1, tol):
        raise BreakdownError("sigma_2 vanished", step=2)

    for n in range(2, N):
        # 1-based n: build v_{n+1} from Z v_n and w_{n+1} from Z w_{n-1}
        zv = z * V[:, n - 1]
        zw = z * W[:, n - 2]
        vh, wh = zv, zw
        r = 1 if opts.strategy == "full" else max(1, n - 2)
        sl = slice(r - 1, n)
        for _ in range(passes):
            hv = (W[:, sl].T @ vh) / s[sl]
            hw = (V[:, sl].T @ wh) / s[sl]
            vh = vh - V[:, sl] @ hv
            wh = wh - W[:, sl] @ hw
            HV[sl, n - 1] = HV[sl, n - 1] + hv
            HW[sl, n - 2] = HW[sl, n - 2] + hw
        nv, nw = k.norm(vh), k.norm(wh)
        if _negligible(k, nv, k.norm(zv), tol) or _negligible(k, nw, k.norm(zw), tol):
            raise BreakdownError(f"zero vector at step {n + 1}", step=n + 1)
        HV[n, n - 1] = nv
        HW[n, n - 2] = nw
        V[:, n] = vh / nv
        W[:, n] = wh / nw
        s[n] = W[:, n] @ V[:, n]
        if _negligible(k, s[n], 1, tol):
            raise BreakdownError(f"sigma_{n + 1} vanished", step=n + 1)

    # last columns: nothing new is generated, only coefficients
    r = 1 if opts.strategy == "full" else max(1, N - 2)
    sl = slice(r - 1, N)
    for col, vec, Hx, left, right in ((N - 1, z * V[:, N - 1], HV, W, V),
                                      (N - 2, z * W[:, N - 2], HW, V, W),
                                      (N - 1, z * W[:, N - 1], HW, V, W)):
        for _ in range(passes):
            h = (left[:, sl].T @ vec) / s[sl]
            vec = vec - right[:, sl] @ h
            Hx[sl, col] = Hx[sl, col] + h

    HV, HW = truncate_bandwidth(HV, HW)
    return BiorthogonalPair(V, W, s), HV, HW


def _band_masks(N):
    i, j = np.indices((N, N))
    return j > i + 2, j > i + 1


def truncate_bandwidth(HV, HW):
    """Zero H_V[i, j] for j > i+2 and H_W[i, j] for j > i+1 (copies)."""
    k = kind_of(HV)
    HV = HV.copy()
    HW = HW.copy()
    mv, mw = _band_masks(HV.shape[0])
    HV[mv] = k.zeros(int(mv.sum()))
    HW[mw] = k.zeros(int(mw.sum()))
    return HV, HW


def biorthogonal_rescale(pair: BiorthogonalPair, HW):
    """(W~, V~, H) with V~ = V Sigma^-1, W~ = W and H = H_W^T."""
    k = kind_of(pair.V)
    if np.any(k.is_zero(pair.sigma)):
        raise BreakdownError("zero sigma in biorthogonal rescale")
    Vt = pair.V / pair.sigma[None, :]
    H = BandedHessenberg.from_dense(HW.T, check=True, monic=False)
    return pair.W, Vt, H


def monic_rescale(H: BandedHessenberg) -> BandedHessenberg:
    """Diagonal similarity making the subdiagonal all ones.

    Only the local factors a_i and a_i a_{i+1} are formed.
    """
    k = H.kind
    a = H.sub
    if np.any(k.is_zero(a)):
        raise BreakdownError("reducible recurrence: zero subdiagonal entry")
    s1 = a * H.super1
    s2 = a[:-1] * a[1:] * H.super2 if H.N > 2 else H.super2
    return BandedHessenberg(k.ones(H.N - 1), H.diag.copy(), s1, s2, monic=True)


def krylreorth_solve(z, start: StartingData, opts: KrylovOptions = KrylovOptions()):
    """Normalize, run :func:`iep_krylreorth` and rescale to a monic H.

    Returns (W~, V~, H) with W~'V~ = I and monic H.
    """
    pair, _, HW = iep_krylreorth(z, normalize_start(start), opts)
    W, V, H = biorthogonal_rescale(pair, HW)
    return W, V, monic_rescale(H)
