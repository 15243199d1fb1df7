"""Reachable sets and tubes of affine interval systems ``z' in A z + B``.

The flow is enclosed by the interval Taylor polynomial of ``exp(A tau)``
plus a Lagrange remainder. All operators take the truncation order ``r``
explicitly; :func:`choose_order` supplies a default.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, TaylorOrderError
from .interval import Interval, IntervalMatrix, iv_add, iv_hull, iv_matmul, iv_norm_inf, iv_scalar_mul

__all__ = [
    "MAX_ORDER",
    "AffineOperators",
    "affine_operators",
    "choose_order",
    "min_order",
    "operator_D",
    "operator_E",
    "operator_F",
    "reach_set_affine",
    "reach_tube_affine",
    "remainder_C",
    "remainder_radius",
]

# (r+1)! overflows float64 past 170; keep a margin for the powers as well.
MAX_ORDER = 150


def min_order(norm_tau):
    """Smallest integer ``r >= 2`` with ``r > norm_tau - 2``."""
    return max(2, math.floor(norm_tau - 2.0) + 1)


def _check(a, tau, r):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"A must be square, got shape {a.shape}")
    if tau < 0 or not math.isfinite(tau):
        raise ValueError(f"tau must be finite and non-negative, got {tau}")
    r = int(r)
    norm_tau = iv_norm_inf(a) * tau
    if r < 2 or not r > norm_tau - 2.0:
        raise TaylorOrderError(r, min_order(norm_tau))
    if r > MAX_ORDER:
        raise ValueError(f"Taylor order {r} exceeds the supported maximum {MAX_ORDER}")
    return r, norm_tau


def remainder_radius(norm_tau, r):
    """Radius of the remainder interval for ``||A||*tau = norm_tau``."""
    if norm_tau == 0.0:
        return 0.0
    log_eps = (r + 1) * math.log(norm_tau) - math.lgamma(r + 2)
    return math.exp(log_eps) * (r + 2) / (r + 2 - norm_tau)


def choose_order(a, tau, remainder_tol=None):
    """Default truncation order ``max(ceil(||A|| tau) + 2, 6)``.

    With ``remainder_tol`` the order is further increased until the
    remainder radius is at most ``remainder_tol`` (capped at MAX_ORDER).
    """
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    norm_tau = iv_norm_inf(a) * tau
    r = max(math.ceil(norm_tau) + 2, 6)
    if remainder_tol is not None:
        while r < MAX_ORDER and remainder_radius(norm_tau, r) > remainder_tol:
            r += 1
    return r


def remainder_C(a, tau, r):
    r, norm_tau = _check(a, tau, r)
    eps = remainder_radius(norm_tau, r)
    p = a.shape[0]
    return IntervalMatrix(np.full((p, p), -eps), np.full((p, p), eps))


def _scaled_powers(a, tau, r):
    """``[(A tau)^0, ..., (A tau)^r]`` by iterated left products."""
    at = iv_scalar_mul(Interval.point(tau), a)
    powers = [IntervalMatrix.eye(a.shape[0])]
    for _ in range(r):
        powers.append(iv_matmul(at, powers[-1]))
    return powers


def _scale(c, m):
    return iv_scalar_mul(Interval.point(c), m)


class AffineOperators:
    """The four Taylor operators for one ``(A, tau, r)``, sharing powers."""

    def __init__(self, a, tau, r):
        r, _ = _check(a, tau, r)
        self.a = a
        self.tau = float(tau)
        self.r = r
        p = a.shape[0]
        powers = _scaled_powers(a, tau, r)
        self.C = remainder_C(a, tau, r)

        d = IntervalMatrix.zeros((p, p))
        e = IntervalMatrix.zeros((p, p))
        for i, pw in enumerate(powers):
            d = iv_add(d, _scale(1.0 / math.factorial(i), pw))
            # A^i tau^(i+1)/(i+1)! == (A tau)^i * tau/(i+1)!
            e = iv_add(e, _scale(tau / math.factorial(i + 1), pw))
        self.D = iv_add(d, self.C)
        self.E = iv_add(e, _scale(tau, self.C))

        f = IntervalMatrix.zeros((p, p))
        for i in range(2, r + 1):
            coef = i ** (-i / (i - 1)) - i ** (-1 / (i - 1))
            f = iv_add(f, _scale(coef / math.factorial(i), powers[i]))
        self.F = iv_add(iv_hull(f, IntervalMatrix.zeros((p, p))), self.C)


def affine_operators(a, tau, r):
    return AffineOperators(a, tau, r)


def operator_D(a, tau, r):
    return AffineOperators(a, tau, r).D


def operator_E(a, tau, r):
    return AffineOperators(a, tau, r).E


def operator_F(a, tau, r):
    return AffineOperators(a, tau, r).F


def reach_set_affine(a, b, z0, tau, r):
    """Enclosure of the time-``tau`` reachable set: ``D Z0 + E B``."""
    if z0.shape != b.shape or z0.shape[0] != a.shape[0]:
        raise DimensionError(f"incompatible shapes A {a.shape}, B {b.shape}, Z0 {z0.shape}")
    ops = AffineOperators(a, tau, r)
    return iv_add(iv_matmul(ops.D, z0), iv_matmul(ops.E, b))


def reach_tube_affine(a, z0, tau, r):
    """Enclosure of the reachable tube over ``[0, tau]`` of ``z' in A z``."""
    if z0.shape[0] != a.shape[0]:
        raise DimensionError(f"incompatible shapes A {a.shape}, Z0 {z0.shape}")
    ops = AffineOperators(a, tau, r)
    return iv_add(iv_hull(z0, iv_matmul(ops.D, z0)), iv_matmul(ops.F, z0))
