"""Built-in systems with analytic Jacobians and constant Jacobian bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._jit import kernel
from .errors import BlowUpError, DimensionError
from .interval import IntervalMatrix
from .sensitivity import SystemModel

__all__ = ["MODELS", "ModelSpec", "make_linear", "make_model", "make_riccati", "make_unicycle"]


# --- unicycle: x = (px, py, heading, dpx, dpy, dheading), p = (v, omega) ---

@kernel
def unicycle_f(t, x, p):
    out = np.zeros(6)
    out[0] = p[0] * np.cos(x[2]) + x[3]
    out[1] = p[0] * np.sin(x[2]) + x[4]
    out[2] = p[1] + x[5]
    return out


@kernel
def unicycle_jx(t, x, p):
    j = np.zeros((6, 6))
    j[0, 2] = -p[0] * np.sin(x[2])
    j[1, 2] = p[0] * np.cos(x[2])
    j[0, 3] = 1.0
    j[1, 4] = 1.0
    j[2, 5] = 1.0
    return j


@kernel
def unicycle_jxx(t, x, p):
    j = np.zeros((6, 36))
    j[0, 14] = -p[0] * np.cos(x[2])
    j[1, 14] = -p[0] * np.sin(x[2])
    return j


def make_unicycle(v=0.25, omega=0.3):
    """Unicycle with constant uncertain offsets on its first three rates.

    The bounds use ``|sin|, |cos| <= 1`` and therefore hold globally.
    """
    v, omega = float(v), float(omega)
    r = abs(v)
    jx_lo = np.zeros((6, 6))
    jx_hi = np.zeros((6, 6))
    for i, j in ((0, 3), (1, 4), (2, 5)):
        jx_lo[i, j] = jx_hi[i, j] = 1.0
    for i in (0, 1):
        jx_lo[i, 2], jx_hi[i, 2] = -r, r
    jxx_lo = np.zeros((6, 36))
    jxx_hi = np.zeros((6, 36))
    for i in (0, 1):
        jxx_lo[i, 14], jxx_hi[i, 14] = -r, r
    return SystemModel(
        n=6,
        f=unicycle_f,
        jx=unicycle_jx,
        jxx=unicycle_jxx,
        jx_bounds=IntervalMatrix(jx_lo, jx_hi),
        jxx_bounds=IntervalMatrix(jxx_lo, jxx_hi),
        params=np.array([v, omega]),
        name="unicycle",
    )


# --- linear: x' = A x, p = A.ravel() ---

@kernel
def linear_f(t, x, p):
    n = x.shape[0]
    return p.reshape((n, n)) @ x


@kernel
def linear_jx(t, x, p):
    n = x.shape[0]
    return p.reshape((n, n)).copy()


@kernel
def linear_jxx(t, x, p):
    n = x.shape[0]
    return np.zeros((n, n * n))


def make_linear(a):
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"A must be a square matrix, got shape {a.shape}")
    n = a.shape[0]
    return SystemModel(
        n=n,
        f=linear_f,
        jx=linear_jx,
        jxx=linear_jxx,
        jx_bounds=IntervalMatrix.point(a),
        jxx_bounds=IntervalMatrix.zeros((n, n * n)),
        params=a.ravel(),
        name="linear",
    )


# --- Riccati: x' = x^2 ---

@kernel
def riccati_f(t, x, p):
    out = np.empty(1)
    out[0] = x[0] * x[0]
    return out


@kernel
def riccati_jx(t, x, p):
    out = np.empty((1, 1))
    out[0, 0] = 2.0 * x[0]
    return out


@kernel
def riccati_jxx(t, x, p):
    return np.full((1, 1), 2.0)


def riccati_flow(t, x0):
    return x0 / (1.0 - t * x0)


def make_riccati(x_lo=0.4, x_hi=0.5, horizon=1.0):
    """Scalar ``x' = x^2`` with bounds valid on ``[x_lo, x_hi]`` over ``horizon``.

    Solutions ``x0 / (1 - t x0)`` increase in time, so the trajectory hull
    is ``[x_lo, x_hi / (1 - horizon x_hi)]``.
    """
    x_lo, x_hi, horizon = float(x_lo), float(x_hi), float(horizon)
    if x_lo > x_hi:
        raise ValueError(f"x_lo ({x_lo}) > x_hi ({x_hi})")
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    if horizon * x_hi >= 1.0:
        raise BlowUpError(
            f"integration blow-up: Riccati solution from x0={x_hi} escapes at t={1.0 / x_hi:.6g} <= horizon {horizon}",
            1.0 / x_hi,
        )
    top = riccati_flow(horizon, x_hi)
    return SystemModel(
        n=1,
        f=riccati_f,
        jx=riccati_jx,
        jxx=riccati_jxx,
        jx_bounds=IntervalMatrix([[2.0 * x_lo]], [[2.0 * top]]),
        jxx_bounds=IntervalMatrix.point([[2.0]]),
        name="riccati",
    )


@dataclass(frozen=True)
class ModelSpec:
    constructor: Callable
    required: tuple
    # Fills box-dependent parameters from (X0, t0, tf) when a config omits them.
    from_problem: Optional[Callable] = None


MODELS = {
    "unicycle": ModelSpec(lambda p: make_unicycle(p["v"], p["omega"]), ("v", "omega")),
    "linear": ModelSpec(lambda p: make_linear(p["A"]), ("A",)),
    "riccati": ModelSpec(
        lambda p: make_riccati(p["x_lo"], p["x_hi"], p["horizon"]),
        ("x_lo", "x_hi", "horizon"),
        from_problem=lambda x0, t0, tf: {"x_lo": float(x0.lo[0]), "x_hi": float(x0.hi[0]), "horizon": tf - t0},
    ),
}


def make_model(name, params=None, x0=None, t0=None, tf=None):
    """Build a registered model from its parameter map."""
    if name not in MODELS:
        raise KeyError(f"unknown model {name!r}; available: {', '.join(sorted(MODELS))}")
    spec = MODELS[name]
    params = dict(params or {})
    if spec.from_problem is not None and x0 is not None:
        for key, value in spec.from_problem(x0, t0, tf).items():
            params.setdefault(key, value)
    missing = [k for k in spec.required if k not in params]
    if missing:
        raise KeyError(f"model {name!r} is missing parameter(s): {', '.join(missing)}")
    for key, value in params.items():
        if key != "A" and not math.isfinite(float(value)):
            raise ValueError(f"parameter {key!r} must be finite")
    return spec.constructor(params)
