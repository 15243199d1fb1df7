"""Interval scalars and interval matrices.

Endpoints are float64 and results use round-to-nearest by default. Inside
an :func:`outward_rounding` block every operation widens its result by a
fixed number of ulps on each side, which covers the rounding error of the
endpoint formulas used here.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

__all__ = [
    "Interval",
    "IntervalMatrix",
    "iv_add",
    "iv_scalar_mul",
    "iv_matmul",
    "iv_kron",
    "iv_hull",
    "iv_norm_inf",
    "iv_abs_sup",
    "iv_contains",
    "outward_rounding",
]

_OUTWARD_ULPS: ContextVar[int] = ContextVar("sensireach_outward_ulps", default=0)


@contextmanager
def outward_rounding(ulps: int = 4):
    """Widen every interval result by ``ulps`` units in the last place."""
    if ulps < 0:
        raise ValueError("ulps must be non-negative")
    token = _OUTWARD_ULPS.set(int(ulps))
    try:
        yield
    finally:
        _OUTWARD_ULPS.reset(token)


def _widen(lo, hi):
    k = _OUTWARD_ULPS.get()
    for _ in range(k):
        lo = np.nextafter(lo, -np.inf)
        hi = np.nextafter(hi, np.inf)
    return lo, hi


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError(f"interval endpoints must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, value):
        return cls(value, value)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, value):
        return self.lo <= value <= self.hi

    def __add__(self, other):
        return iv_add(self, other)

    def __mul__(self, other):
        return iv_scalar_mul(self, other)


class IntervalMatrix:
    """Elementwise ``[lo, hi]`` bounds on a real vector or matrix.

    One-dimensional instances serve as interval vectors (boxes). Instances
    are immutable; the endpoint arrays are read-only copies.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = np.array(lo, dtype=np.float64)
        hi = lo.copy() if hi is None else np.array(hi, dtype=np.float64)
        if lo.ndim not in (1, 2):
            raise DimensionError(f"interval matrices are 1-D or 2-D, got ndim={lo.ndim}")
        if lo.shape != hi.shape:
            raise DimensionError(f"lower/upper shapes differ: {lo.shape} vs {hi.shape}")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("interval endpoints must be finite")
        if np.any(lo > hi):
            idx = tuple(int(i) for i in np.argwhere(lo > hi)[0])
            raise ValueError(f"empty interval at {idx}: [{lo[idx]}, {hi[idx]}]")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self.lo = lo
        self.hi = hi

    @classmethod
    def point(cls, values):
        return cls(values, values)

    @classmethod
    def zeros(cls, shape):
        z = np.zeros(shape)
        return cls(z, z)

    @classmethod
    def eye(cls, n):
        return cls.point(np.eye(n))

    @classmethod
    def from_pairs(cls, pairs):
        """Interval vector from ``[[lo, hi], ...]``."""
        arr = np.asarray(pairs, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DimensionError("expected a sequence of [lo, hi] pairs")
        return cls(arr[:, 0], arr[:, 1])

    @property
    def shape(self):
        return self.lo.shape

    @property
    def ndim(self):
        return self.lo.ndim

    @property
    def rows(self):
        return self.lo.shape[0]

    @property
    def cols(self):
        return self.lo.shape[1] if self.lo.ndim == 2 else 1

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self):
        return self.hi - self.lo

    def is_point(self):
        return bool(np.all(self.lo == self.hi))

    def is_subset(self, other):
        return bool(np.all(other.lo <= self.lo) and np.all(self.hi <= other.hi))

    def contains(self, values, slack=0.0):
        return iv_contains(self, values, slack)

    def __getitem__(self, key):
        lo, hi = self.lo[key], self.hi[key]
        if np.ndim(lo) == 0:
            return Interval(lo, hi)
        return IntervalMatrix(lo, hi)

    def __add__(self, other):
        return iv_add(self, other)

    def __matmul__(self, other):
        return iv_matmul(self, other)

    def __eq__(self, other):
        if not isinstance(other, IntervalMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self.lo == other.lo) and np.all(self.hi == other.hi))

    __hash__ = None

    def __repr__(self):
        return f"IntervalMatrix(lo={self.lo.tolist()!r}, hi={self.hi.tolist()!r})"


def _endpoints(x):
    if isinstance(x, Interval):
        return np.float64(x.lo), np.float64(x.hi)
    return x.lo, x.hi


def _wrap(lo, hi, like):
    lo, hi = _widen(lo, hi)
    if isinstance(like, Interval):
        return Interval(float(lo), float(hi))
    return IntervalMatrix(lo, hi)


def _check_same_shape(a, b, op):
    sa = () if isinstance(a, Interval) else a.shape
    sb = () if isinstance(b, Interval) else b.shape
    if sa != sb:
        raise DimensionError(f"{op}: shape mismatch {sa} vs {sb}")


def _mul_bounds(alo, ahi, blo, bhi):
    p1 = alo * blo
    p2 = alo * bhi
    p3 = ahi * blo
    p4 = ahi * bhi
    lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
    hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
    return lo, hi


def iv_add(a, b):
    _check_same_shape(a, b, "iv_add")
    alo, ahi = _endpoints(a)
    blo, bhi = _endpoints(b)
    return _wrap(alo + blo, ahi + bhi, a)


def iv_scalar_mul(a, b):
    """Scalar interval ``a`` times interval ``b`` (scalar or matrix), elementwise."""
    if not isinstance(a, Interval):
        raise TypeError("iv_scalar_mul expects an Interval as first argument")
    blo, bhi = _endpoints(b)
    lo, hi = _mul_bounds(np.float64(a.lo), np.float64(a.hi), blo, bhi)
    return _wrap(lo, hi, b)


def iv_matmul(a, b):
    if a.ndim != 2 or b.ndim not in (1, 2):
        raise DimensionError("iv_matmul expects a matrix on the left")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"iv_matmul: inner dimensions differ ({a.shape} @ {b.shape})")
    vec = b.ndim == 1
    blo = b.lo[:, None] if vec else b.lo
    bhi = b.hi[:, None] if vec else b.hi
    lo, hi = _mul_bounds(a.lo[:, :, None], a.hi[:, :, None], blo[None, :, :], bhi[None, :, :])
    lo = lo.sum(axis=1)
    hi = hi.sum(axis=1)
    if vec:
        lo, hi = lo[:, 0], hi[:, 0]
    return _wrap(lo, hi, a)


def iv_kron(a, b):
    """Interval Kronecker product; block ``(i, j)`` is ``a[i, j] * b``."""
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError("iv_kron expects two matrices")
    (p, q), (r, s) = a.shape, b.shape
    lo, hi = _mul_bounds(
        a.lo[:, None, :, None], a.hi[:, None, :, None], b.lo[None, :, None, :], b.hi[None, :, None, :]
    )
    return _wrap(lo.reshape(p * r, q * s), hi.reshape(p * r, q * s), a)


def iv_hull(a, b):
    _check_same_shape(a, b, "iv_hull")
    alo, ahi = _endpoints(a)
    blo, bhi = _endpoints(b)
    return _wrap(np.minimum(alo, blo), np.maximum(ahi, bhi), a)


def iv_abs_sup(a):
    """Entrywise ``max(|lo|, |hi|)``."""
    lo, hi = _endpoints(a)
    return np.maximum(np.abs(lo), np.abs(hi))


def iv_norm_inf(a):
    """Infinity norm (max absolute row sum) of :func:`iv_abs_sup`."""
    m = iv_abs_sup(a)
    if np.ndim(m) == 0:
        return float(m)
    if m.ndim == 1:
        return float(m.max(initial=0.0))
    return float(m.sum(axis=1).max(initial=0.0))


def iv_contains(a, values, slack=0.0):
    if slack < 0:
        raise ValueError("slack must be non-negative")
    lo, hi = _endpoints(a)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != np.shape(lo):
        raise DimensionError(f"iv_contains: shape mismatch {np.shape(lo)} vs {values.shape}")
    return bool(np.all(lo - slack <= values) and np.all(values <= hi + slack))
