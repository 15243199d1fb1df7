"""Flow and first/second-order sensitivity integration.

The sensitivities obey the variational equations

    Sx'  = Jx Sx,                         Sx(t0)  = I
    Sxx' = Jx Sxx + Jxx (Sx kron Sx),     Sxx(t0) = 0

integrated jointly with the state. The augmented state is laid out as
``x``, then ``Sx`` column-major, then ``Sxx`` (n x n^2) column-major.
Second-derivative matrices use the layout
``Jxx[i, j*n + k] = d^2 f_i / dx_j dx_k`` (0-based).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _jit
from ._parallel import parallel_map
from .errors import DimensionError
from .integrators import IntegratorConfig, solve
from .interval import IntervalMatrix

__all__ = [
    "FlowResult",
    "IntegratorConfig",
    "JacobianBoundReport",
    "SystemModel",
    "check_jacobian_bounds",
    "finite_diff_second_sensitivity",
    "finite_diff_sensitivity",
    "flow",
    "flow_many",
    "flow_with_second_sensitivity",
    "flow_with_sensitivity",
    "sensitivity_many",
]


@dataclass(frozen=True, eq=False)
class SystemModel:
    """Dynamics ``x' = f(t, x)`` with analytic Jacobians and their bounds.

    ``f``, ``jx`` and ``jxx`` are called as ``func(t, x, params)`` and
    return arrays of shape ``(n,)``, ``(n, n)`` and ``(n, n*n)``. When they
    are compiled kernels the compiled integration path is used.
    """

    n: int
    f: Callable
    jx: Callable
    jx_bounds: IntervalMatrix
    jxx: Optional[Callable] = None
    jxx_bounds: Optional[IntervalMatrix] = None
    params: np.ndarray = field(default_factory=lambda: np.zeros(0))
    name: str = "custom"

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise ValueError("state dimension must be >= 1")
        if self.jx_bounds.shape != (n, n):
            raise DimensionError(f"Jx bounds must be {n}x{n}, got {self.jx_bounds.shape}")
        if self.jxx_bounds is not None and self.jxx_bounds.shape != (n, n * n):
            raise DimensionError(f"Jxx bounds must be {n}x{n * n}, got {self.jxx_bounds.shape}")
        object.__setattr__(self, "params", np.ascontiguousarray(self.params, dtype=np.float64))

    def rhs(self, t, x):
        return np.asarray(self.f(float(t), _vec(x, self.n), self.params))

    def jacobian(self, t, x):
        return np.asarray(self.jx(float(t), _vec(x, self.n), self.params))

    def hessian(self, t, x):
        if self.jxx is None:
            raise ValueError(f"model {self.name!r} has no second-order Jacobian")
        return np.asarray(self.jxx(float(t), _vec(x, self.n), self.params))


@dataclass
class FlowResult:
    phi: np.ndarray
    sx: Optional[np.ndarray] = None
    sxx: Optional[np.ndarray] = None


def _vec(x, n):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise DimensionError(f"expected a state vector of length {n}, got shape {x.shape}")
    return x


def _first_order_rhs(f, jx, n):
    nn = n * n

    def rhs(t, y, p):
        dy = np.empty(y.shape[0])
        x = y[:n]
        dy[:n] = f(t, x, p)
        if y.shape[0] == n:
            return dy
        sx = np.ascontiguousarray(y[n:n + nn].reshape((n, n)).T)
        dy[n:n + nn] = (jx(t, x, p) @ sx).T.flatten()
        return dy

    return rhs


def _second_order_rhs(f, jx, jxx, n):
    nn = n * n

    def rhs(t, y, p):
        dy = np.empty(y.shape[0])
        x = y[:n]
        dy[:n] = f(t, x, p)
        if y.shape[0] == n:
            return dy
        sx = np.ascontiguousarray(y[n:n + nn].reshape((n, n)).T)
        jac = jx(t, x, p)
        dy[n:n + nn] = (jac @ sx).T.flatten()
        if y.shape[0] == n + nn:
            return dy
        sxx = np.ascontiguousarray(y[n + nn:].reshape((nn, n)).T)
        dsxx = jac @ sxx + jxx(t, x, p) @ np.kron(sx, sx)
        dy[n + nn:] = dsxx.T.flatten()
        return dy

    return rhs


@functools.lru_cache(maxsize=None)
def _augmented_rhs(f, jx, jxx, n):
    compiled = _jit.is_compiled(f) and _jit.is_compiled(jx) and (jxx is None or _jit.is_compiled(jxx))
    if jxx is None:
        rhs = _first_order_rhs(f, jx, n)
    else:
        rhs = _second_order_rhs(f, jx, jxx, n)
    return _jit.kernel(rhs) if compiled else rhs


def _rhs_for(model, depth):
    if depth == 2 and model.jxx is None:
        raise ValueError(f"model {model.name!r} has no second-order Jacobian")
    return _augmented_rhs(model.f, model.jx, model.jxx, model.n)


def _initial_state(n, x0, depth):
    parts = [x0]
    if depth >= 1:
        parts.append(np.eye(n).ravel())
    if depth >= 2:
        parts.append(np.zeros(n ** 3))
    return np.concatenate(parts)


def _unpack(y, n, depth):
    nn = n * n
    res = FlowResult(phi=y[:n].copy())
    if depth >= 1:
        res.sx = y[n:n + nn].reshape((n, n)).T.copy()
    if depth >= 2:
        res.sxx = y[n + nn:].reshape((nn, n)).T.copy()
    return res


def _run(model, t0, tf, x0, cfg, depth):
    cfg = cfg or IntegratorConfig()
    x0 = _vec(x0, model.n)
    y = solve(_rhs_for(model, depth), model.params, t0, tf, _initial_state(model.n, x0, depth), cfg)
    return _unpack(y, model.n, depth)


def flow(model, t0, tf, x0, cfg=None):
    """State reached at ``tf`` from ``x0`` at ``t0``."""
    return _run(model, t0, tf, x0, cfg, 0).phi


def flow_with_sensitivity(model, t0, tf, x0, cfg=None):
    return _run(model, t0, tf, x0, cfg, 1)


def flow_with_second_sensitivity(model, t0, tf, x0, cfg=None):
    return _run(model, t0, tf, x0, cfg, 2)


def flow_many(model, t0, tf, points, cfg=None, threads=None):
    """Endpoints for each row of ``points``; output order follows input order."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    out = parallel_map(lambda x: flow(model, t0, tf, x, cfg), list(pts), threads)
    return np.array(out).reshape(len(pts), model.n)


def sensitivity_many(model, t0, tf, points, cfg=None, threads=None):
    """First-order sensitivities ``(N, n, n)`` at each row of ``points``."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    out = parallel_map(lambda x: flow_with_sensitivity(model, t0, tf, x, cfg).sx, list(pts), threads)
    return np.array(out).reshape(len(pts), model.n, model.n)


def finite_diff_sensitivity(model, t0, tf, x0, h=1e-5, cfg=None):
    """Central-difference estimate of ``Sx``, column by column."""
    if h <= 0:
        raise ValueError("h must be positive")
    x0 = _vec(x0, model.n)
    cols = []
    for j in range(model.n):
        e = np.zeros(model.n)
        e[j] = h
        cols.append((flow(model, t0, tf, x0 + e, cfg) - flow(model, t0, tf, x0 - e, cfg)) / (2 * h))
    return np.column_stack(cols)


def finite_diff_second_sensitivity(model, t0, tf, x0, h=1e-4, cfg=None):
    """Central differences of the integrated ``Sx``; column ``j*n + k`` is d Sx[:, j] / d x0_k."""
    if h <= 0:
        raise ValueError("h must be positive")
    n = model.n
    x0 = _vec(x0, n)
    out = np.empty((n, n * n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        d = (flow_with_sensitivity(model, t0, tf, x0 + e, cfg).sx - flow_with_sensitivity(model, t0, tf, x0 - e, cfg).sx) / (2 * h)
        for j in range(n):
            out[:, j * n + k] = d[:, j]
    return out


@dataclass
class JacobianBoundReport:
    checked: int
    violations: list

    @property
    def ok(self):
        return not self.violations


def check_jacobian_bounds(model, t0, tf, x0, cfg=None, samples=50, slack=1e-12):
    """Sample ``Jx``/``Jxx`` along one trajectory against the declared bounds.

    Each violation is recorded as ``(t, "jx" | "jxx", excess)``.
    """
    cfg = cfg or IntegratorConfig()
    times = np.linspace(t0, tf, samples + 1)
    steps = max(1, cfg.steps // samples)
    seg_cfg = IntegratorConfig(cfg.method, steps, cfg.rel_tol, cfg.abs_tol)
    x = _vec(x0, model.n)
    violations = []
    for k, t in enumerate(times):
        if k > 0:
            x = flow(model, times[k - 1], t, x, seg_cfg)
        pairs = [("jx", model.jx_bounds, model.jacobian(t, x))]
        if model.jxx is not None and model.jxx_bounds is not None:
            pairs.append(("jxx", model.jxx_bounds, model.hessian(t, x)))
        for tag, bounds, value in pairs:
            excess = max(float(np.max(bounds.lo - value)), float(np.max(value - bounds.hi)))
            if excess > slack:
                violations.append((float(t), tag, excess))
    return JacobianBoundReport(checked=len(times), violations=violations)
