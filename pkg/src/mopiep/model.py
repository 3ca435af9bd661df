"""Discrete inner products, measure families and the banded recurrence matrix."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import BreakdownError, ValidationError
from .rng import XorShift64Star
from .scalar import DDArray, DOUBLE, RATIONAL, Kind, get_kind, kind_of

__all__ = [
    "DiscreteSystem", "BandedHessenberg", "StartingData",
    "Kravchuk", "Hahn", "Synthetic", "MeasureFamily",
    "build_system", "family_weights", "pochhammer", "kravchuk_typeII_eval", "starting_vectors",
    "check_normality", "hessenberg_matvec", "moment_block_matrix",
]


def _as_number(x):
    if isinstance(x, str):
        return Fraction(x)
    return x


# ---------------------------------------------------------------------------
# discrete systems

@dataclass(frozen=True)
class DiscreteSystem:
    """Nodes and the two positive weight vectors of the discrete measures."""

    nodes: object
    weights1: object
    weights2: object

    def __post_init__(self):
        n = len(self.nodes)
        if len(self.weights1) != n or len(self.weights2) != n:
            raise ValidationError("nodes and weights must have equal length")
        if n < 3:
            raise ValidationError(f"need N >= 3 nodes, got {n}")
        k = self.kind
        for name in ("weights1", "weights2"):
            w = getattr(self, name)
            if isinstance(w, DDArray):
                ok = bool(np.all(w.hi > 0))
            elif k is RATIONAL:
                ok = all(v > 0 for v in w)
            else:
                ok = bool(np.all(np.asarray(w) > 0))
            if not ok:
                raise ValidationError(f"{name} must be strictly positive")
        if k is RATIONAL:
            distinct = len(set(self.nodes)) == n
        else:
            zf = np.sort(k.to_float(self.nodes))
            distinct = bool(np.all(np.diff(zf) != 0))
        if not distinct:
            raise ValidationError("nodes must be pairwise distinct")

    @classmethod
    def from_values(cls, nodes, weights1, weights2, kind="double") -> "DiscreteSystem":
        k = get_kind(kind)
        return cls(k.asarray(nodes), k.asarray(weights1), k.asarray(weights2))

    @property
    def N(self) -> int:
        return len(self.nodes)

    @property
    def kind(self) -> Kind:
        return kind_of(self.nodes)

    def astype(self, kind) -> "DiscreteSystem":
        k = get_kind(kind)
        return DiscreteSystem(k.asarray(self.nodes), k.asarray(self.weights1), k.asarray(self.weights2))

    def to_json(self) -> str:
        return json.dumps({
            "nodes": _encode(self.nodes),
            "weights1": _encode(self.weights1),
            "weights2": _encode(self.weights2),
        })

    @classmethod
    def from_json(cls, text: str) -> "DiscreteSystem":
        d = json.loads(text)
        try:
            cols = [d["nodes"], d["weights1"], d["weights2"]]
        except KeyError as exc:
            raise ValidationError(f"system JSON missing key {exc}") from None
        rational = any(isinstance(v, str) for c in cols for v in c)
        k = RATIONAL if rational else DOUBLE
        return cls(*(k.asarray([_as_number(v) for v in c]) for c in cols))


def _encode(x):
    """Rationals (and extended values, exactly) as strings; doubles as numbers."""
    k = kind_of(x)
    if k is DOUBLE:
        return [float(v) for v in np.asarray(x)]
    return [str(v) for v in RATIONAL.asarray(x)]


# ---------------------------------------------------------------------------
# measure families

@dataclass(frozen=True)
class Kravchuk:
    p1: object = Fraction(2, 5)
    p2: object = Fraction(1, 2)
    binomial_variant: bool = False

    def __post_init__(self):
        p1, p2 = Fraction(_as_number(self.p1)), Fraction(_as_number(self.p2))
        if not (0 < p1 < 1 and 0 < p2 < 1):
            raise ValidationError("Kravchuk parameters must lie in (0, 1)")
        if p1 == p2:
            raise ValidationError("Kravchuk parameters must be distinct")


@dataclass(frozen=True)
class Hahn:
    beta1: object = Fraction(1)
    beta2: object = Fraction(3, 2)
    gamma: object = Fraction(1)

    def __post_init__(self):
        b1, b2, g = (Fraction(_as_number(v)) for v in (self.beta1, self.beta2, self.gamma))
        if min(b1, b2, g) <= -1:
            raise ValidationError("Hahn parameters must exceed -1")
        if b1 == b2:
            raise ValidationError("Hahn beta parameters must be distinct")


@dataclass(frozen=True)
class Synthetic:
    node_rule: str = "equidistant"
    seed: int = 0
    weight_rule: str = "uniform"

    def __post_init__(self):
        if self.node_rule not in ("equidistant", "chebyshev"):
            raise ValidationError(f"unknown node rule {self.node_rule!r}")
        if self.weight_rule != "uniform":
            raise ValidationError(f"unknown weight rule {self.weight_rule!r}")


MeasureFamily = Union[Kravchuk, Hahn, Synthetic]


def _kravchuk_weights(N, p, binomial, one):
    p = one * p
    q = one - p
    w = [p ** i * q ** (N - i) for i in range(N)]
    if binomial:
        w = [math.comb(N - 1, i) * wi for i, wi in enumerate(w)]
    return w


def _hahn_weights(N, beta, gamma, one):
    beta = one * beta
    gamma = one * gamma
    # w_0 = (gamma+1)_{N-1} / (N-1)!
    w0 = one
    for k in range(N - 1):
        w0 = w0 * (gamma + 1 + k) / (k + 1)
    w = [w0]
    for i in range(N - 1):
        r = (beta + 1 + i) / (i + 1) * (N - 1 - i) / (gamma + N - 1 - i)
        w.append(w[-1] * r)
    return w


def _synthetic_nodes(N, rule):
    if rule == "equidistant":
        return np.linspace(-1.0, 1.0, N)
    # Chebyshev points of the first kind, ascending
    k = np.arange(N)
    return np.cos((2 * k + 1) * np.pi / (2 * N))[::-1].copy()


def synthetic_weights(N: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights uniform on [1, 2); drawn as (alpha1_i, alpha2_i) pairs so systems nest in N."""
    g = XorShift64Star(seed)
    a = np.empty((N, 2))
    for i in range(N):
        a[i, 0] = 1.0 + g.uniform()
        a[i, 1] = 1.0 + g.uniform()
    return a[:, 0], a[:, 1]


def family_weights(family: MeasureFamily, N: int, kind=None):
    """Weight vectors of a measure family for any N >= 1."""
    if isinstance(family, Synthetic):
        k = get_kind(kind or "double")
        a1, a2 = synthetic_weights(N, family.seed)
        return k.asarray(a1), k.asarray(a2)
    k = get_kind(kind or "rational")
    if isinstance(family, Kravchuk):
        a1 = _kravchuk_weights(N, Fraction(_as_number(family.p1)), family.binomial_variant, Fraction(1))
        a2 = _kravchuk_weights(N, Fraction(_as_number(family.p2)), family.binomial_variant, Fraction(1))
    elif isinstance(family, Hahn):
        b1, b2, g = (Fraction(_as_number(v)) for v in (family.beta1, family.beta2, family.gamma))
        if k is DOUBLE:
            # ratio updates in floating point avoid huge integers for large N
            a1 = _hahn_weights(N, float(b1), float(g), 1.0)
            a2 = _hahn_weights(N, float(b2), float(g), 1.0)
        else:
            a1 = _hahn_weights(N, b1, g, Fraction(1))
            a2 = _hahn_weights(N, b2, g, Fraction(1))
    else:
        raise ValidationError(f"unknown family {family!r}")
    return k.asarray(a1), k.asarray(a2)


def build_system(family: MeasureFamily, N: int, kind=None) -> DiscreteSystem:
    """Discrete system of size ``N`` for a measure family.

    Kravchuk and Hahn default to the rational kind (parameters are read as
    exact fractions) on nodes 0..N-1; synthetic systems default to double.
    """
    if N < 3:
        raise ValidationError(f"need N >= 3, got {N}")
    if isinstance(family, Synthetic):
        k = get_kind(kind or "double")
        z = k.asarray(_synthetic_nodes(N, family.node_rule))
    else:
        k = get_kind(kind or "rational")
        z = k.asarray(list(range(N)))
    a1, a2 = family_weights(family, N, k)
    return DiscreteSystem(z, a1, a2)


# ---------------------------------------------------------------------------
# explicit formulas

def pochhammer(c, j: int):
    """Rising factorial (c)_j."""
    out = 1 if isinstance(c, (int, Fraction)) else type(c)(1)
    for i in range(j):
        out = out * (c + i)
    return out


def kravchuk_typeII_eval(n1: int, n2: int, p1, p2, Nref: int, x):
    """Explicit type II multiple Kravchuk polynomial, evaluated term by term.

    With the binomial weights C(M, i) p^i (1-p)^(M-i) on {0..M} the
    orthogonality relations hold for ``Nref = M - 1``.
    """
    if n1 + n2 > Nref:
        raise ValidationError("n1 + n2 must not exceed Nref")
    m = n1 + n2
    s = 0
    for j in range(m + 1):
        xj = pochhammer(-x, j) * Fraction(1, pochhammer(-Nref - 1, j))
        for k in range(j + 1):
            # integer ratios as Fractions so rational inputs stay exact
            c1 = Fraction(pochhammer(-n1, k), math.factorial(k))
            c2 = Fraction(pochhammer(-n2, j - k), math.factorial(j - k))
            s = s + c1 * (1 / p1) ** k * c2 * (1 / p2) ** (j - k) * xj
    return p1 ** n1 * p2 ** n2 * pochhammer(-Nref - 1, m) * s


# ---------------------------------------------------------------------------
# starting data

@dataclass
class StartingData:
    w1: object
    w2: object
    v1: object
    d1: object
    d2: object
    d3: object

    @property
    def kind(self) -> Kind:
        return kind_of(self.w1)

    def residuals(self, nodes) -> tuple[float, float, float]:
        """|w1'v1 - 1|, |w2'v1|, |w2'Zv1 - 1| as floats."""
        k = self.kind
        z = k.asarray(nodes)
        r = (self.w1 @ self.v1 - 1, self.w2 @ self.v1, self.w2 @ (z * self.v1) - 1)
        return tuple(abs(float(k.to_float(v))) for v in r)


def starting_vectors(system: DiscreteSystem) -> StartingData:
    k = system.kind
    z, a1, a2 = system.nodes, system.weights1, system.weights2
    d1 = a1.sum()
    d2 = a2.sum()
    w1 = a1 / d1
    m = (z * a1).sum() / d1
    d3 = ((z - m) * a2).sum()
    scale = (abs(z - m) * a2).sum()
    if k.is_zero(d3) or abs(float(k.to_float(d3))) <= 8 * system.N * k.eps * float(k.to_float(scale)):
        raise BreakdownError("degenerate pair of measures: d3 = 0", step=1)
    w2 = (a2 - d2 * w1) / d3
    v1 = k.ones(system.N)
    return StartingData(w1, w2, v1, d1, d2, d3)


# ---------------------------------------------------------------------------
# normality

def moment_block_matrix(system: DiscreteSystem, n1: int, n2: int):
    """[M1 | M2] with entries m^{(j)}_{l+k}, |n| rows."""
    k = system.kind
    n = n1 + n2
    z = system.nodes
    M = k.zeros((n, n))
    for j, (nj, a) in enumerate(((n1, system.weights1), (n2, system.weights2))):
        mom = []
        p = a.copy()
        for _ in range(n + nj):
            mom.append(p.sum())
            p = p * z
        off = 0 if j == 0 else n1
        for l in range(n):
            for c in range(nj):
                M[l, off + c] = mom[l + c]
    return M


def _exact_rank(M) -> int:
    A = np.array(M, dtype=object)
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c] != 0), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        for i in range(r + 1, rows):
            f = A[i, c] / A[r, c]
            if f:
                A[i, c:] = A[i, c:] - f * A[r, c:]
        r += 1
    return r


def check_normality(system: DiscreteSystem, n1: int, n2: int) -> bool:
    n = n1 + n2
    if n > system.N:
        raise ValidationError("n1 + n2 must not exceed N")
    if n == 0:
        return True
    M = moment_block_matrix(system, n1, n2)
    if system.kind is RATIONAL:
        return _exact_rank(M) == n
    s = np.linalg.svd(system.kind.to_float(M), compute_uv=False)
    return bool(s[-1] > n * np.finfo(float).eps * s[0])


# ---------------------------------------------------------------------------
# banded Hessenberg matrix

@dataclass
class BandedHessenberg:
    """Four diagonals of the recurrence matrix.

    ``sub[i] = H[i+1, i]``, ``diag[i] = H[i, i]``, ``super1[i] = H[i, i+1]``,
    ``super2[i] = H[i, i+2]`` (0-based).
    """

    sub: object
    diag: object
    super1: object
    super2: object
    monic: bool = field(default=False)

    def __post_init__(self):
        n = len(self.diag)
        if len(self.sub) != n - 1 or len(self.super1) != n - 1 or len(self.super2) != max(n - 2, 0):
            raise ValidationError("inconsistent diagonal lengths")
        if self.monic:
            k = self.kind
            if not np.all(k.to_float(self.sub) == 1.0) or (k is RATIONAL and any(v != 1 for v in self.sub)):
                raise ValidationError("monic flag set but subdiagonal is not all ones")

    @property
    def N(self) -> int:
        return len(self.diag)

    @property
    def kind(self) -> Kind:
        return kind_of(self.diag)

    @classmethod
    def from_dense(cls, H, check: bool = True, monic: bool | None = None) -> "BandedHessenberg":
        k = kind_of(H)
        N = H.shape[0]
        if check:
            outside = np.tril(np.ones((N, N), bool), -2) | np.triu(np.ones((N, N), bool), 3)
            nz = ~k.is_zero(H) if k is not DOUBLE else (np.asarray(H) != 0)
            if np.any(nz & outside):
                raise ValidationError("matrix has entries outside the banded pattern")
        idx = np.arange(N)
        sub = H[idx[1:], idx[:-1]]
        diag = H[idx, idx]
        s1 = H[idx[:-1], idx[1:]]
        s2 = H[idx[:-2], idx[2:]]
        if monic is None:
            monic = bool(np.all(k.to_float(sub) == 1.0)) and (k is not RATIONAL or all(v == 1 for v in sub))
        return cls(sub, diag, s1, s2, monic)

    def to_dense(self):
        k = self.kind
        N = self.N
        H = k.zeros((N, N))
        idx = np.arange(N)
        H[idx, idx] = self.diag
        H[idx[1:], idx[:-1]] = self.sub
        H[idx[:-1], idx[1:]] = self.super1
        if N > 2:
            H[idx[:-2], idx[2:]] = self.super2
        return H

    def astype(self, kind) -> "BandedHessenberg":
        k = get_kind(kind)
        return BandedHessenberg(k.asarray(self.sub), k.asarray(self.diag), k.asarray(self.super1),
                                k.asarray(self.super2), self.monic)

    def matvec(self, x, transpose: bool = False):
        return hessenberg_matvec(self, x, transpose)

    def to_json(self) -> str:
        return json.dumps({
            "sub": _encode(self.sub), "diag": _encode(self.diag),
            "super1": _encode(self.super1), "super2": _encode(self.super2),
            "monic": bool(self.monic),
        })

    @classmethod
    def from_json(cls, text: str) -> "BandedHessenberg":
        d = json.loads(text)
        cols = [d["sub"], d["diag"], d["super1"], d["super2"]]
        rational = any(isinstance(v, str) for c in cols for v in c)
        k = RATIONAL if rational else DOUBLE
        return cls(*(k.asarray([_as_number(v) for v in c]) if c else k.zeros(0) for c in cols),
                   monic=bool(d.get("monic", False)))


def hessenberg_matvec(H: BandedHessenberg, x, transpose: bool = False):
    """Hx (or H'x) from the four stored diagonals in O(N)."""
    if len(x) != H.N:
        raise ValidationError("dimension mismatch")
    y = H.diag * x
    N = H.N
    if not transpose:
        y[1:] = y[1:] + H.sub * x[:-1]
        y[:-1] = y[:-1] + H.super1 * x[1:]
        if N > 2:
            y[:-2] = y[:-2] + H.super2 * x[2:]
    else:
        y[:-1] = y[:-1] + H.sub * x[1:]
        y[1:] = y[1:] + H.super1 * x[:-1]
        if N > 2:
            y[2:] = y[2:] + H.super2 * x[:-2]
    return y


def as_kind_array(values: Sequence, kind) -> object:
    return get_kind(kind).asarray(list(values))
