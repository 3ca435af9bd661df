"""Scalar kinds: machine double, double-double and exact rationals.

The solvers are written against plain array arithmetic (``+ - * / @``,
slicing, ``.T``) so the same code runs on

* ``numpy.float64`` arrays (kind ``double``),
* :class:`DDArray`, a vectorised unevaluated hi+lo pair (kind ``extended``),
* object arrays of :class:`fractions.Fraction` (kind ``rational``).

Anything that cannot be expressed with operators (norms, zeros, conversion)
goes through a :class:`Kind` instance.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational

import numpy as np

__all__ = [
    "DDArray", "ExtendedScalar", "Kind", "DOUBLE", "EXTENDED", "RATIONAL",
    "get_kind", "kind_of", "ext", "ext_arith", "rat_arith", "convert",
    "two_sum", "two_prod",
]

_SPLITTER = 134217729.0  # 2**27 + 1


# ---------------------------------------------------------------------------
# error-free transformations (vectorised, work on scalars and arrays alike)

def two_sum(a, b):
    """s + e == a + b exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def _quick_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    e = b - (s - a)
    return s, e


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """p + e == a * b exactly (Dekker)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e = e + t
    s, e = _quick_two_sum(s, e)
    e = e + f
    return _quick_two_sum(s, e)


def _dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return _quick_two_sum(p, e)


def _dd_mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e = e + al * b
    return _quick_two_sum(p, e)


def _dd_div(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = _dd_mul_d(bh, bl, q1)
    rh, rl = _dd_add(ah, al, -ph, -pl)
    q2 = rh / bh
    ph, pl = _dd_mul_d(bh, bl, q2)
    rh, rl = _dd_add(rh, rl, -ph, -pl)
    q3 = rh / bh
    q1, q2 = _quick_two_sum(q1, q2)
    return _dd_add(q1, q2, q3, np.zeros_like(q3))


def _fraction_to_dd(f: Fraction) -> tuple[float, float]:
    hi = float(f)  # correctly rounded
    return hi, float(f - Fraction(hi))


def _parts(x):
    """(hi, lo) float arrays for anything the arithmetic accepts."""
    if isinstance(x, DDArray):
        return x.hi, x.lo
    if isinstance(x, (Fraction, Rational)) and not isinstance(x, Integral):
        h, l = _fraction_to_dd(Fraction(x))
        return np.float64(h), np.float64(l)
    if isinstance(x, Integral) and abs(int(x)) > 2 ** 53:
        h, l = _fraction_to_dd(Fraction(int(x)))
        return np.float64(h), np.float64(l)
    a = np.asarray(x)
    if a.dtype == object:
        pairs = [_fraction_to_dd(Fraction(v)) for v in a.ravel()]
        hi = np.array([p[0] for p in pairs], dtype=float).reshape(a.shape)
        lo = np.array([p[1] for p in pairs], dtype=float).reshape(a.shape)
        return hi, lo
    a = a.astype(float)
    return a, np.zeros_like(a)


def _tree_sum(hi, lo, axis):
    hi = np.moveaxis(hi, axis, 0)
    lo = np.moveaxis(lo, axis, 0)
    if hi.shape[0] == 0:
        return np.zeros(hi.shape[1:]), np.zeros(hi.shape[1:])
    while hi.shape[0] > 1:
        if hi.shape[0] % 2:
            pad = np.zeros((1,) + hi.shape[1:])
            hi = np.concatenate([hi, pad])
            lo = np.concatenate([lo, pad])
        hi, lo = _dd_add(hi[0::2], lo[0::2], hi[1::2], lo[1::2])
    return hi[0], lo[0]


# ---------------------------------------------------------------------------

class DDArray:
    """Array of double-double numbers stored as two float64 arrays.

    ``hi`` is the double nearest the value, ``lo`` the trailing correction.
    A 0-d instance doubles as the extended scalar type.
    """

    __array_ufunc__ = None  # make numpy defer to our reflected operators
    __hash__ = None

    def __init__(self, hi, lo=None):
        self.hi = np.array(hi, dtype=float)
        self.lo = np.zeros_like(self.hi) if lo is None else np.array(lo, dtype=float)

    @classmethod
    def from_value(cls, x) -> "DDArray":
        hi, lo = _parts(x)
        return cls(hi, lo)

    # shape handling --------------------------------------------------------
    @property
    def shape(self):
        return self.hi.shape

    @property
    def ndim(self):
        return self.hi.ndim

    @property
    def size(self):
        return self.hi.size

    def __len__(self):
        return len(self.hi)

    @property
    def T(self):
        return DDArray(self.hi.T, self.lo.T)

    def copy(self):
        return DDArray(self.hi.copy(), self.lo.copy())

    def reshape(self, *shape):
        return DDArray(self.hi.reshape(*shape), self.lo.reshape(*shape))

    def ravel(self):
        return DDArray(self.hi.ravel(), self.lo.ravel())

    def __getitem__(self, idx):
        return DDArray(self.hi[idx], self.lo[idx])

    def __setitem__(self, idx, value):
        hi, lo = _parts(value)
        self.hi[idx] = hi
        self.lo[idx] = lo

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        bh, bl = _parts(other)
        return DDArray(*_dd_add(self.hi, self.lo, bh, bl))

    __radd__ = __add__

    def __sub__(self, other):
        bh, bl = _parts(other)
        return DDArray(*_dd_add(self.hi, self.lo, -bh, -bl))

    def __rsub__(self, other):
        bh, bl = _parts(other)
        return DDArray(*_dd_add(bh, bl, -self.hi, -self.lo))

    def __mul__(self, other):
        bh, bl = _parts(other)
        return DDArray(*_dd_mul(self.hi, self.lo, bh, bl))

    __rmul__ = __mul__

    def __truediv__(self, other):
        bh, bl = _parts(other)
        with np.errstate(divide="ignore", invalid="ignore"):
            return DDArray(*_dd_div(self.hi, self.lo, bh, bl))

    def __rtruediv__(self, other):
        ah, al = _parts(other)
        with np.errstate(divide="ignore", invalid="ignore"):
            return DDArray(*_dd_div(ah, al, self.hi, self.lo))

    def __neg__(self):
        return DDArray(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __abs__(self):
        neg = self.hi < 0
        return DDArray(np.where(neg, -self.hi, self.hi), np.where(neg, -self.lo, self.lo))

    def sum(self, axis=None):
        if axis is None:
            return DDArray(*_tree_sum(self.hi.ravel(), self.lo.ravel(), 0))
        return DDArray(*_tree_sum(self.hi, self.lo, axis))

    def __matmul__(self, other):
        b = other if isinstance(other, DDArray) else DDArray.from_value(other)
        a = self
        if a.ndim == 1 and b.ndim == 1:
            return (a * b).sum()
        if a.ndim == 2 and b.ndim == 1:
            return (a * b[None, :]).sum(axis=1)
        if a.ndim == 1 and b.ndim == 2:
            return (a[:, None] * b).sum(axis=0)
        m, k = a.shape
        n = b.shape[1]
        if m * k * n <= 2_000_000:
            return (a[:, :, None] * b[None, :, :]).sum(axis=1)
        out = DDArray(np.zeros((m, n)))
        for j in range(n):
            out[:, j] = a @ b[:, j]
        return out

    def __rmatmul__(self, other):
        return DDArray.from_value(other) @ self

    def sqrt(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.sqrt(self.hi)
            # one Newton step in double-double
            xh, xl = two_prod(x, x)
            rh, rl = _dd_add(self.hi, self.lo, -xh, -xl)
            corr = np.where(x > 0, rh / (2.0 * np.where(x > 0, x, 1.0)), 0.0)
        return DDArray(*_quick_two_sum(x, corr))

    # comparisons go through the sign of the difference
    def _diff(self, other):
        return (self - other).hi

    def __lt__(self, other):
        return self._diff(other) < 0

    def __le__(self, other):
        return self._diff(other) <= 0

    def __gt__(self, other):
        return self._diff(other) > 0

    def __ge__(self, other):
        return self._diff(other) >= 0

    def __eq__(self, other):
        d = self - other
        return (d.hi == 0) & (d.lo == 0)

    def __ne__(self, other):
        return ~(self == other)

    # conversion ------------------------------------------------------------
    def __float__(self):
        return float(self.hi)

    def to_float(self) -> np.ndarray:
        return self.hi + self.lo

    def to_fraction(self):
        if self.ndim == 0:
            return Fraction(float(self.hi)) + Fraction(float(self.lo))
        out = np.empty(self.shape, dtype=object)
        for idx in np.ndindex(self.shape):
            out[idx] = Fraction(float(self.hi[idx])) + Fraction(float(self.lo[idx]))
        return out

    def __repr__(self):
        if self.ndim == 0:
            return f"DDArray({float(self.hi)!r}, {float(self.lo)!r})"
        return f"DDArray(hi={self.hi!r}, lo={self.lo!r})"


ExtendedScalar = DDArray


def ext(x, lo: float = 0.0) -> DDArray:
    """Build an extended scalar (or array) from a float, int, Fraction or pair."""
    if lo:
        return DDArray(*_quick_two_sum(np.float64(x), np.float64(lo)))
    return DDArray.from_value(x)


# ---------------------------------------------------------------------------
# kinds

class Kind:
    """Factory and helper functions for one scalar kind."""

    name: str = ""
    eps: float = 0.0
    rank: int = 0  # ordering by precision, used to pick the finer of two kinds

    def asarray(self, x):
        raise NotImplementedError

    def zeros(self, shape):
        raise NotImplementedError

    def eye(self, n: int):
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = 1
        return out

    def ones(self, n: int):
        return self.asarray([1] * n)

    def scalar(self, x):
        return self.asarray(x) if isinstance(x, (list, tuple)) else self.asarray([x])[0]

    def norm(self, x):
        """Euclidean norm (max-abs norm for rationals, see ``RationalKind``)."""
        raise NotImplementedError

    def to_float(self, x) -> np.ndarray:
        raise NotImplementedError

    def is_zero(self, x) -> np.ndarray:
        return np.asarray(self.to_float(x)) == 0

    def __repr__(self):
        return f"<kind {self.name}>"


class DoubleKind(Kind):
    name = "double"
    eps = float(np.finfo(float).eps)
    rank = 0

    def asarray(self, x):
        if isinstance(x, DDArray):
            return x.to_float()
        a = np.asarray(x)
        if a.dtype == object:
            return np.array([float(v) for v in a.ravel()], dtype=float).reshape(a.shape)
        return a.astype(float)

    def zeros(self, shape):
        return np.zeros(shape)

    def eye(self, n):
        return np.eye(n)

    def scalar(self, x):
        return float(x)

    def norm(self, x):
        return np.linalg.norm(x)

    def to_float(self, x):
        return np.asarray(x, dtype=float)


class ExtendedKind(Kind):
    name = "extended"
    eps = 2.0 ** -104
    rank = 1

    def asarray(self, x):
        return x.copy() if isinstance(x, DDArray) else DDArray.from_value(x)

    def zeros(self, shape):
        return DDArray(np.zeros(shape))

    def eye(self, n):
        return DDArray(np.eye(n))

    def scalar(self, x):
        return DDArray.from_value(x)

    def norm(self, x):
        return (x * x).sum().sqrt()

    def to_float(self, x):
        return x.to_float() if isinstance(x, DDArray) else np.asarray(x, dtype=float)

    def is_zero(self, x):
        return (x.hi == 0) & (x.lo == 0)


class RationalKind(Kind):
    """Exact arithmetic on object arrays of ``Fraction``.

    Square roots leave the rationals, so ``norm`` is the max-abs norm here.
    Every place a norm is used only fixes a scaling, and the final
    recurrence matrix does not depend on it.
    """

    name = "rational"
    eps = 0.0
    rank = 2

    def asarray(self, x):
        if isinstance(x, DDArray):
            return x.to_fraction()
        a = np.asarray(x, dtype=object)
        out = np.empty(a.shape, dtype=object)
        for idx in np.ndindex(a.shape):
            out[idx] = _to_fraction(a[idx])
        return out

    def zeros(self, shape):
        out = np.empty(shape, dtype=object)
        out[...] = Fraction(0)
        return out

    def scalar(self, x):
        return _to_fraction(x)

    def norm(self, x):
        return max((abs(v) for v in np.asarray(x).ravel()), default=Fraction(0))

    def to_float(self, x):
        a = np.asarray(x, dtype=object)
        return np.array([float(v) for v in a.ravel()], dtype=float).reshape(a.shape)

    def is_zero(self, x):
        a = np.asarray(x, dtype=object)
        return np.array([v == 0 for v in a.ravel()], dtype=bool).reshape(a.shape)


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, DDArray):
        return v.to_fraction()
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (float, np.floating)):
        return Fraction(float(v))
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    return Fraction(v)


DOUBLE = DoubleKind()
EXTENDED = ExtendedKind()
RATIONAL = RationalKind()
_KINDS = {k.name: k for k in (DOUBLE, EXTENDED, RATIONAL)}


def get_kind(kind) -> Kind:
    if isinstance(kind, Kind):
        return kind
    try:
        return _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown scalar kind {kind!r}") from None


def kind_of(x) -> Kind:
    """Infer the kind of an array produced by one of the kinds above."""
    if isinstance(x, DDArray):
        return EXTENDED
    if isinstance(x, Fraction):
        return RATIONAL
    a = np.asarray(x)
    if a.dtype == object:
        return RATIONAL
    return DOUBLE


def finer(a: Kind, b: Kind) -> Kind:
    return a if a.rank >= b.rank else b


# ---------------------------------------------------------------------------
# scalar-level operations with explicit division-by-zero errors

_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def ext_arith(a: DDArray, b: DDArray, op: str) -> DDArray:
    if op == "div" and float(b.hi) == 0.0:
        raise ZeroDivisionError("extended division by zero")
    return _OPS[op](ext(a), ext(b))


def rat_arith(a: Fraction, b: Fraction, op: str) -> Fraction:
    if op == "div" and b == 0:
        raise ZeroDivisionError("rational division by zero")
    return _OPS[op](Fraction(a), Fraction(b))


def convert(x, target):
    """Convert a scalar or array to ``target`` kind.

    Rational to floating is correctly rounded, floating to rational exact.
    """
    return get_kind(target).scalar(x) if np.ndim(x) == 0 and not isinstance(x, (list, tuple)) \
        else get_kind(target).asarray(x)
