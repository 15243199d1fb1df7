"""Explicit Runge-Kutta drivers: fixed-step RK4 and adaptive Dormand-Prince 5(4).

The drivers are kernels (see ``_jit``). They take the right-hand side as a
function ``rhs(t, y, p)`` and return ``(y, status, t_stop)`` where status
is OK, NONFINITE or STEP_FAILURE; the Python wrappers turn a bad status
into :class:`~sensireach.errors.BlowUpError`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import is_compiled, kernel, python_impl
from .errors import BlowUpError

__all__ = ["IntegratorConfig", "integrate", "solve"]

OK = 0
NONFINITE = 1
STEP_FAILURE = 2

_MAX_STEPS = 10_000_000


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    steps: int = 1000
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"unknown integration method {self.method!r} (expected 'rk4' or 'rk45')")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")


@kernel
def rk4_solve(rhs, p, t0, tf, y0, steps):
    h = (tf - t0) / steps
    y = y0.copy()
    if tf == t0:
        return y, OK, t0
    for k in range(steps):
        t = t0 + k * h
        k1 = rhs(t, y, p)
        k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1, p)
        k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2, p)
        k4 = rhs(t + h, y + h * k3, p)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            return y, NONFINITE, t + h
    return y, OK, tf


@kernel
def dopri5_solve(rhs, p, t0, tf, y0, rtol, atol):
    y = y0.copy()
    if tf == t0:
        return y, OK, t0
    span = tf - t0
    t = t0
    k1 = rhs(t, y, p)
    scale = atol + rtol * np.abs(y)
    d0 = np.sqrt(np.mean((y / scale) ** 2))
    d1 = np.sqrt(np.mean((k1 / scale) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6 * span
    else:
        h = min(0.01 * d0 / d1, span)
    h = max(h, 1e-12 * span)
    for _ in range(_MAX_STEPS):
        if t >= tf:
            return y, OK, tf
        if t + h > tf:
            h = tf - t
        k2 = rhs(t + h / 5.0, y + h * (k1 / 5.0), p)
        k3 = rhs(t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2), p)
        k4 = rhs(t + 4.0 * h / 5.0, y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3), p)
        k5 = rhs(
            t + 8.0 * h / 9.0,
            y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4),
            p,
        )
        k6 = rhs(
            t + h,
            y
            + h
            * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4
               - 5103.0 / 18656.0 * k5),
            p,
        )
        y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5
                      + 11.0 / 84.0 * k6)
        k7 = rhs(t + h, y5, p)
        err = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4 - 17253.0 / 339200.0 * k5
                   + 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7)
        if not np.all(np.isfinite(y5)):
            if h < 1e-14 * span:
                return y, NONFINITE, t + h
            h *= 0.25
            continue
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        e = np.sqrt(np.mean((err / scale) ** 2))
        if e <= 1.0:
            t = t + h
            y = y5
            k1 = k7
            fac = 5.0 if e == 0.0 else min(5.0, max(0.2, 0.9 * e ** -0.2))
        else:
            fac = max(0.2, 0.9 * e ** -0.2)
        h = h * fac
        if h < 1e-14 * span:
            return y, STEP_FAILURE, t
    return y, STEP_FAILURE, t


def solve(rhs, params, t0, tf, y0, cfg):
    """Integrate ``rhs(t, y, params)`` from ``t0`` to ``tf``.

    Uses the compiled driver when ``rhs`` is itself a compiled kernel and the
    plain-numpy driver otherwise.
    """
    if tf < t0:
        raise ValueError(f"tf ({tf}) must be >= t0 ({t0})")
    y0 = np.ascontiguousarray(y0, dtype=np.float64)
    params = np.ascontiguousarray(params, dtype=np.float64)
    compiled = is_compiled(rhs)
    if cfg.method == "rk4":
        driver = rk4_solve if compiled else python_impl(rk4_solve)
        y, status, t_stop = driver(rhs, params, float(t0), float(tf), y0, int(cfg.steps))
    else:
        driver = dopri5_solve if compiled else python_impl(dopri5_solve)
        y, status, t_stop = driver(rhs, params, float(t0), float(tf), y0, float(cfg.rel_tol), float(cfg.abs_tol))
    if status == NONFINITE:
        raise BlowUpError(f"integration blow-up: non-finite state at t={t_stop:.6g}", t_stop)
    if status == STEP_FAILURE:
        raise BlowUpError(f"integration blow-up: step size underflow at t={t_stop:.6g}", t_stop)
    return y


def integrate(rhs, t0, tf, y0, cfg=None):
    """Solution at ``tf`` of ``y' = rhs(t, y)``, ``y(t0) = y0``."""
    cfg = cfg or IntegratorConfig()

    def _rhs(t, y, p):
        return np.asarray(rhs(t, y), dtype=np.float64)

    return solve(_rhs, np.zeros(0), t0, tf, np.atleast_1d(np.asarray(y0, dtype=np.float64)), cfg)
