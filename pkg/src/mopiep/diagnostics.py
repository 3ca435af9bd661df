"""Error measures, type II evaluation, node/weight recovery and conditioning."""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dense
from .errors import ConvergenceError, ValidationError
from .krylov import KrylovOptions, krylreorth_solve
from .model import BandedHessenberg, DiscreteSystem, starting_vectors
from .rng import XorShift64Star, derive_seed
from .scalar import DDArray, DOUBLE, EXTENDED, RATIONAL, finer, kind_of

__all__ = [
    "ErrorReport", "spectral_norm", "forward_error", "eval_typeII", "recover_nodes",
    "recover_weights", "backward_errors", "conditioning_estimate", "biorth_loss",
    "biorth_loss_scaled",
]


@dataclass
class ErrorReport:
    forward: float = float("nan")
    biorth_loss: float = float("nan")
    backward_nodes: float = float("nan")
    backward_weights1: float = float("nan")
    backward_weights2: float = float("nan")
    conditioning: float | None = None


# ---------------------------------------------------------------------------

def spectral_norm(A, tol: float = 1e-10, maxiter: int = 10_000, seed: int = 12345,
                  return_info: bool = False):
    """Largest singular value by power iteration on A'A.

    With ``return_info`` a pair (value, converged) is returned; otherwise a
    warning is issued when the iteration did not converge.
    """
    A = np.asarray(kind_of(A).to_float(A), dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    scale = np.abs(A).max() if A.size else 0.0
    if scale == 0 or not np.isfinite(scale):
        return (float(scale), True) if return_info else float(scale)
    B = A / scale
    g = XorShift64Star(seed)
    x = np.array([g.uniform() - 0.5 for _ in range(B.shape[1])])
    x /= np.linalg.norm(x)
    sigma = 0.0
    converged = False
    for _ in range(maxiter):
        y = B.T @ (B @ x)
        ny = np.linalg.norm(y)
        if ny == 0:
            # start vector in the null space; restart along a unit vector
            x = np.zeros_like(x)
            x[np.argmax(np.abs(B).sum(axis=0))] = 1.0
            continue
        new = np.sqrt(ny)
        x = y / ny
        if abs(new - sigma) <= tol * new:
            sigma = new
            converged = True
            break
        sigma = new
    # the Rayleigh-type estimate ||B x|| is sharper than sqrt(||B'B x||)
    sigma = max(sigma, np.linalg.norm(B @ x))
    if not converged and not return_info:
        warnings.warn("spectral_norm: power iteration did not converge", RuntimeWarning)
    value = float(sigma * scale)
    return (value, converged) if return_info else value


def _dense_in(H, k):
    D = H.to_dense() if isinstance(H, BandedHessenberg) else H
    return k.asarray(D)


def forward_error(H, Href) -> float:
    """||Href - H||_2 / ||Href||_2 with the difference taken in the finer kind."""
    kh = H.kind if isinstance(H, BandedHessenberg) else kind_of(H)
    kr = Href.kind if isinstance(Href, BandedHessenberg) else kind_of(Href)
    k = finer(kh, kr)
    A = _dense_in(H, k)
    R = _dense_in(Href, k)
    if A.shape != R.shape:
        raise ValidationError("dimension mismatch")
    return spectral_norm(k.to_float(R - A)) / spectral_norm(k.to_float(R))


def eval_typeII(H: BandedHessenberg, x):
    """P_0..P_N and derivatives at x from the monic recurrence.

    ``x`` may be a scalar or a 1-d array of H's kind; the results have shape
    (N+1,) + shape(x).
    """
    if not H.monic:
        raise ValidationError("eval_typeII needs a monic recurrence matrix")
    k = H.kind
    x = k.asarray(x) if np.ndim(x) else k.scalar(x)
    N = H.N
    shape = (N + 1,) + tuple(np.shape(x.hi if isinstance(x, DDArray) else x))
    P = k.zeros(shape)
    dP = k.zeros(shape)
    P[0] = k.ones(1)[0] + 0 * x
    for n in range(N):
        p = (x - H.diag[n]) * P[n]
        dp = P[n] + (x - H.diag[n]) * dP[n]
        if n >= 1:
            p = p - H.super1[n - 1] * P[n - 1]
            dp = dp - H.super1[n - 1] * dP[n - 1]
        if n >= 2:
            p = p - H.super2[n - 2] * P[n - 2]
            dp = dp - H.super2[n - 2] * dP[n - 2]
        P[n + 1] = p
        dP[n + 1] = dp
    return P, dP


def recover_nodes(H: BandedHessenberg, guesses, tol: float = 1e-14, maxiter: int = 100):
    """Roots of P_N by safeguarded Newton from each guess, sorted ascending.

    Runs in double-double (exact for a rational H at guesses that are roots).
    Returns an extended array, or a rational one when every guess is an exact
    root of a rational H.
    """
    N = H.N
    if len(guesses) != N:
        raise ValidationError("need one guess per node")
    gf = np.sort(np.asarray(kind_of(guesses).to_float(guesses), dtype=float))
    if np.any(np.diff(gf) == 0):
        raise ValidationError("guesses must be pairwise distinct")

    if H.kind is RATIONAL:
        xr = RATIONAL.asarray(guesses)
        P, _ = eval_typeII(H, xr)
        if all(v == 0 for v in P[N]):
            return RATIONAL.asarray(sorted(xr))

    He = H.astype(EXTENDED)
    x = EXTENDED.asarray(guesses)
    xf = x.to_float()
    order = np.argsort(xf)
    gaps = np.full(N, np.inf)
    srt = xf[order]
    d = np.diff(srt)
    gaps[order[:-1]] = np.minimum(gaps[order[:-1]], d)
    gaps[order[1:]] = np.minimum(gaps[order[1:]], d)
    done = np.zeros(N, dtype=bool)
    for _ in range(maxiter):
        P, dP = eval_typeII(He, x)
        f, df = P[N], dP[N]
        ff = f.to_float()
        dff = df.to_float()
        zero = ff == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / df
        sf = step.to_float()
        bad = ~np.isfinite(sf) | (np.abs(sf) > 0.5 * gaps)
        # safeguard: shrink the step towards the guess neighbourhood
        if np.any(bad & ~zero):
            lim = 0.25 * np.where(np.isfinite(gaps), gaps, 1.0)
            sgn = np.sign(np.where(dff == 0, 1.0, sf))
            repl = np.where(np.isfinite(sf), np.clip(sf, -lim, lim), sgn * lim)
            step[bad] = DDArray(repl[bad])
        step[zero] = DDArray(np.zeros(int(zero.sum())))
        step[done] = DDArray(np.zeros(int(done.sum())))
        x = x - step
        sf = step.to_float()
        done |= np.abs(sf) <= tol * (1 + np.abs(x.to_float()))
        if done.all():
            break
    else:
        bad = int(np.nonzero(~done)[0][0])
        raise ConvergenceError(f"Newton did not converge for guess {bad}", index=bad)

    xf = x.to_float()
    order = np.argsort(xf)
    x = x[order]
    xs = xf[order]
    if np.any(np.diff(xs) <= 1e-10 * (1 + np.abs(xs[1:]))):
        raise ConvergenceError("root collision: two guesses converged to the same root")
    return x


def recover_weights(H: BandedHessenberg, nodes, d1, d2, d3):
    """Weights from the first two columns of W = V^-T (V: type II values at the nodes).

    Only (d1, d2, d3) from the original data fix the scaling. A least-squares
    fit of d2, d3 against given weights would be an alternative.
    """
    k = RATIONAL if (H.kind is RATIONAL and kind_of(nodes) is RATIONAL) else EXTENDED
    Hk = H.astype(k)
    z = k.asarray(nodes)
    N = H.N
    P, _ = eval_typeII(Hk, z)
    Vm = P[:N].T.copy()          # Vm[i, j] = P_j(z_i)
    rhs = k.zeros((N, 2))
    rhs[0, 0] = k.scalar(1)
    rhs[1, 1] = k.scalar(1)
    try:
        Wc = dense.solve(Vm.T.copy(), rhs, k)
    except Exception as exc:
        raise ValidationError(f"singular type II value matrix: {exc}") from None
    w1, w2 = Wc[:, 0], Wc[:, 1]
    d1, d2, d3 = (k.scalar(v) for v in (d1, d2, d3))
    return d1 * w1, d2 * w1 + d3 * w2


def _rel(k, a, b) -> float:
    return float(np.linalg.norm(k.to_float(a - b))) / float(np.linalg.norm(k.to_float(a)))


def backward_errors(system: DiscreteSystem, H: BandedHessenberg) -> dict:
    """Relative node and weight errors of the data reconstructed from H."""
    if H.N != system.N:
        raise ValidationError("dimension mismatch")
    k = RATIONAL if (H.kind is RATIONAL and system.kind is RATIONAL) else EXTENDED
    sysk = system.astype(k)
    st = starting_vectors(sysk)
    zh = recover_nodes(H, sysk.nodes)
    kz = kind_of(zh)
    if kz is not k:
        k = EXTENDED
        sysk = system.astype(k)
        st = starting_vectors(sysk)
    a1, a2 = recover_weights(H, zh, st.d1, st.d2, st.d3)
    z = k.asarray(sysk.nodes)
    order = np.argsort(k.to_float(z))
    z, w1, w2 = z[order], sysk.weights1[order], sysk.weights2[order]
    return {
        "backward_nodes": _rel(k, z, k.asarray(zh)),
        "backward_w1": _rel(k, w1, k.asarray(a1)),
        "backward_w2": _rel(k, w2, k.asarray(a2)),
    }


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MOP_THREADS", "1")))
    except ValueError:
        return 1


def _extended_solve(system: DiscreteSystem) -> BandedHessenberg:
    sx = system.astype(EXTENDED)
    _, _, H = krylreorth_solve(sx.nodes, starting_vectors(sx), KrylovOptions("full", True))
    return H


def perturb_system(system: DiscreteSystem, relative_eps: float, seed: int) -> DiscreteSystem:
    """Every node and weight times (1 + relative_eps * u), u uniform on [-1, 1), in double-double."""
    sx = system.astype(EXTENDED)
    g = XorShift64Star(seed)
    N = system.N
    u = np.array([2.0 * g.uniform() - 1.0 for _ in range(3 * N)]) * relative_eps
    parts = [x + x * u[i * N:(i + 1) * N] for i, x in enumerate((sx.nodes, sx.weights1, sx.weights2))]
    return DiscreteSystem(*parts)


def conditioning_estimate(system: DiscreteSystem, relative_eps: float, trials: int = 5,
                          seed: int = 0, workers: int | None = None) -> float:
    """Max forward error caused by relative data perturbations, all solves in double-double."""
    if relative_eps < 0:
        raise ValidationError("relative_eps must be nonnegative")
    if relative_eps == 0 or trials == 0:
        return 0.0
    H0 = _extended_solve(system)

    def one(t):
        Ht = _extended_solve(perturb_system(system, relative_eps, derive_seed(seed, t)))
        return forward_error(Ht, H0)

    workers = workers or _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            errs = list(ex.map(one, range(trials)))
    else:
        errs = [one(t) for t in range(trials)]
    return max(errs)


def biorth_loss(W, V) -> float:
    """||W'V - I||_2."""
    k = kind_of(W)
    E = W.T @ V - k.eye(V.shape[1])
    return spectral_norm(k.to_float(E))


def biorth_loss_scaled(W, V, z) -> float:
    """Loss after the monic diagonal scaling V -> V D, W -> W D^-1.

    D is built from a_i = w_{i+1}' Z v_i in log form so it never overflows.
    """
    Wf = np.asarray(kind_of(W).to_float(W), dtype=float)
    Vf = np.asarray(kind_of(V).to_float(V), dtype=float)
    zf = np.asarray(kind_of(z).to_float(z), dtype=float)
    a = np.einsum("ij,ij->j", Wf[:, 1:], zf[:, None] * Vf[:, :-1])
    logd = np.concatenate([[0.0], np.cumsum(np.log(np.abs(a)))])
    sgn = np.concatenate([[1.0], np.cumprod(np.sign(a))])
    E = Wf.T @ Vf - np.eye(Vf.shape[1])
    with np.errstate(over="ignore", invalid="ignore"):
        S = E * np.exp(logd[None, :] - logd[:, None]) * (sgn[None, :] * sgn[:, None])
    S[E == 0] = 0.0
    return spectral_norm(S)
