"""The four-step sensitivity-based reachability pipeline and two baselines.

Steps of :func:`run_algorithm1`:

1. interval enclosure of the first-order sensitivity tube over ``[t0, tf]``;
2. interval enclosure of the second-order sensitivity at ``tf``;
3. sampled first-order sensitivities dilated by the step-2 bound;
4. mixed-monotone enclosure of the reachable set from the step-3 bounds.

:func:`run_ia_only` replaces steps 1-3 by a single interval enclosure of
``Sx(tf)``; :func:`run_sampling_falsification` replaces them by sampling
plus a local search and gives no guarantee.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .affine import choose_order, operator_D, reach_set_affine, reach_tube_affine
from .errors import DimensionError, SensireachError, StepError
from .integrators import IntegratorConfig
from .interval import IntervalMatrix, iv_kron, iv_matmul
from .mixed_monotone import build_decomposition, reach_oa_mm
from .sampling import dilation, sensitivity_bounds_from_samples, uniform_grid
from .sensitivity import flow_many, flow_with_sensitivity, sensitivity_many

__all__ = [
    "DEFAULT_REMAINDER_TOL",
    "MonteCarloReport",
    "ReachProblem",
    "ReachResult",
    "SensitivityBundle",
    "monte_carlo_check",
    "problem_order",
    "run_algorithm1",
    "run_ia_only",
    "run_sampling_falsification",
    "step1_sx_tube",
    "step2_sxx_set",
    "step3_sx_set",
    "step4_reach",
]

METHODS = ("algorithm1", "ia_only", "sampling_falsification")

# Remainder radius targeted by the default Taylor order.
DEFAULT_REMAINDER_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ReachProblem:
    model: object
    t0: float
    tf: float
    x0: IntervalMatrix

    def __post_init__(self):
        if not self.tf >= self.t0:
            raise ValueError(f"tf ({self.tf}) must be >= t0 ({self.t0})")
        if self.x0.ndim != 1 or self.x0.shape[0] != self.model.n:
            raise DimensionError(f"X0 must be an interval vector of length {self.model.n}")

    @property
    def tau(self):
        return float(self.tf - self.t0)


@dataclass(eq=False)
class SensitivityBundle:
    sx_set: IntervalMatrix
    method: str
    sx_tube: Optional[IntervalMatrix] = None
    sxx_set: Optional[IntervalMatrix] = None
    grid_per_dim: Optional[int] = None
    taylor_order: Optional[int] = None
    dilation: Optional[np.ndarray] = None


@dataclass(eq=False)
class MonteCarloReport:
    count: int
    seed: int
    fraction_contained: float
    worst_violation: np.ndarray
    slack: float
    initial_states: np.ndarray
    endpoints: np.ndarray

    @property
    def all_contained(self):
        return self.fraction_contained == 1.0


@dataclass(eq=False)
class ReachResult:
    over_approx: IntervalMatrix
    bundle: SensitivityBundle
    timings: dict = field(default_factory=dict)
    mc_report: Optional[MonteCarloReport] = None

    @property
    def guaranteed(self):
        return self.bundle.method != "sampling_falsification"


def problem_order(problem, taylor_order=None):
    """Taylor order shared by every interval step of one problem."""
    if taylor_order is not None:
        return int(taylor_order)
    return choose_order(problem.model.jx_bounds, problem.tau, remainder_tol=DEFAULT_REMAINDER_TOL)


def step1_sx_tube(problem, taylor_order=None):
    n = problem.model.n
    r = problem_order(problem, taylor_order)
    return reach_tube_affine(problem.model.jx_bounds, IntervalMatrix.eye(n), problem.tau, r)


def step2_sxx_set(problem, sx_tube, taylor_order=None):
    """Second-order sensitivity enclosure at ``tf``.

    ``sx_tube`` must enclose ``Sx`` over the whole of ``[t0, tf]``; the
    input term of the ``Sxx`` dynamics is bounded with it.
    """
    model = problem.model
    if model.jxx_bounds is None:
        raise ValueError(f"model {model.name!r} provides no second-order Jacobian bounds")
    n = model.n
    r = problem_order(problem, taylor_order)
    forcing = iv_matmul(model.jxx_bounds, iv_kron(sx_tube, sx_tube))
    return reach_set_affine(model.jx_bounds, forcing, IntervalMatrix.zeros((n, n * n)), problem.tau, r)


def _dispersion(grid, x0, mode):
    if mode == "scalar":
        return grid.dispersion
    if mode == "per_dim":
        return grid.coordinate_dispersion
    raise ValueError(f"unknown dispersion mode {mode!r} (expected 'scalar' or 'per_dim')")


def step3_sx_set(problem, sxx_set, a, cfg=None, threads=None, dispersion="per_dim"):
    """Guaranteed ``Sx(tf)`` bounds from a uniform grid; returns ``(bounds, grid)``.

    ``dispersion="per_dim"`` bounds the distance to the nearest grid point
    separately in each coordinate (``w_k / 2a``); ``"scalar"`` uses the
    single infinity-norm dispersion ``max_k w_k / 2a`` for every coordinate.
    Both are valid; they coincide on boxes with equal side lengths.
    """
    grid = uniform_grid(problem.x0, a)
    samples = sensitivity_many(problem.model, problem.t0, problem.tf, grid.points, cfg, threads)
    d = _dispersion(grid, problem.x0, dispersion)
    return sensitivity_bounds_from_samples(sxx_set, samples, d), grid


def step4_reach(problem, sx_set, cfg=None, threads=None):
    spec = build_decomposition(sx_set)
    return reach_oa_mm(problem.model, problem.t0, problem.tf, spec, problem.x0, cfg, threads)


class _Clock:
    def __init__(self):
        self.timings = {}

    def run(self, name, func, *args, **kwargs):
        start = time.perf_counter()
        try:
            out = func(*args, **kwargs)
        except SensireachError as exc:
            raise StepError(name, exc) from exc
        self.timings[name] = time.perf_counter() - start
        return out


def run_algorithm1(problem, a, cfg=None, taylor_order=None, threads=None, dispersion="per_dim"):
    cfg = cfg or IntegratorConfig()
    r = problem_order(problem, taylor_order)
    clock = _Clock()
    tube = clock.run("step1", step1_sx_tube, problem, r)
    sxx = clock.run("step2", step2_sxx_set, problem, tube, r)
    sx, grid = clock.run("step3", step3_sx_set, problem, sxx, a, cfg, threads, dispersion)
    box = clock.run("step4", step4_reach, problem, sx, cfg, threads)
    bundle = SensitivityBundle(
        sx_set=sx,
        method="algorithm1",
        sx_tube=tube,
        sxx_set=sxx,
        grid_per_dim=int(a),
        taylor_order=r,
        dilation=dilation(sxx, _dispersion(grid, problem.x0, dispersion)),
    )
    return ReachResult(over_approx=box, bundle=bundle, timings=clock.timings)


def run_ia_only(problem, cfg=None, taylor_order=None, threads=None):
    cfg = cfg or IntegratorConfig()
    r = problem_order(problem, taylor_order)
    clock = _Clock()
    sx = clock.run("step3", operator_D, problem.model.jx_bounds, problem.tau, r)
    box = clock.run("step4", step4_reach, problem, sx, cfg, threads)
    bundle = SensitivityBundle(sx_set=sx, method="ia_only", taylor_order=r)
    return ReachResult(over_approx=box, bundle=bundle, timings=clock.timings)


class _Falsifier:
    """Empirical ``Sx`` hull with the states attaining each bound."""

    def __init__(self, problem, cfg):
        self.problem = problem
        self.cfg = cfg
        self.cache = {}
        n = problem.model.n
        self.lo = np.full((n, n), np.inf)
        self.hi = np.full((n, n), -np.inf)
        self.arg_lo = np.zeros((n, n, n))
        self.arg_hi = np.zeros((n, n, n))

    def record(self, x, sx):
        self.cache[x.tobytes()] = sx
        lower = sx < self.lo
        upper = sx > self.hi
        self.lo = np.where(lower, sx, self.lo)
        self.hi = np.where(upper, sx, self.hi)
        self.arg_lo[lower] = x
        self.arg_hi[upper] = x

    def evaluate(self, x):
        key = x.tobytes()
        if key not in self.cache:
            p = self.problem
            self.record(x, flow_with_sensitivity(p.model, p.t0, p.tf, x, self.cfg).sx)
        return self.cache[key]

    def search(self, i, j, sign, halvings=8):
        """Cyclic coordinate search maximising ``sign * Sx[i, j]`` over X0."""
        lo, hi = self.problem.x0.lo, self.problem.x0.hi
        x = (self.arg_hi if sign > 0 else self.arg_lo)[i, j].copy()
        best = sign * self.evaluate(x)[i, j]
        step = 0.5 * (hi - lo)
        free = np.flatnonzero(step > 0)
        for _ in range(halvings + 1):
            improved = True
            while improved:
                improved = False
                for k in free:
                    for direction in (1.0, -1.0):
                        cand = x.copy()
                        cand[k] = min(max(cand[k] + direction * step[k], lo[k]), hi[k])
                        value = sign * self.evaluate(cand)[i, j]
                        if value > best:
                            x, best, improved = cand, value, True
            step = 0.5 * step


def _sample_into(fals, grid, threads):
    p = fals.problem
    samples = sensitivity_many(p.model, p.t0, p.tf, grid.points, fals.cfg, threads)
    for x, sx in zip(grid.points, samples):
        fals.record(x, sx)


def _falsify(fals, several_samples, max_iters):
    n = fals.problem.model.n
    constant = (fals.lo == fals.hi) & several_samples
    for _ in range(max_iters):
        before_lo, before_hi = fals.lo.copy(), fals.hi.copy()
        for i in range(n):
            for j in range(n):
                if constant[i, j]:
                    continue
                fals.search(i, j, +1.0)
                fals.search(i, j, -1.0)
        if np.array_equal(before_lo, fals.lo) and np.array_equal(before_hi, fals.hi):
            break


def run_sampling_falsification(problem, a, max_iters=2, cfg=None, threads=None):
    """Sampled ``Sx`` hull enlarged by local falsification searches.

    Not a guaranteed enclosure. Entries whose samples are identical across
    two or more distinct grid points are treated as constant and not
    searched.
    """
    cfg = cfg or IntegratorConfig()
    if max_iters < 0:
        raise ValueError("max_iters must be >= 0")
    clock = _Clock()
    grid = uniform_grid(problem.x0, a)
    fals = _Falsifier(problem, cfg)
    clock.run("sampling", _sample_into, fals, grid, threads)
    clock.run("falsification", _falsify, fals, len(grid) > 1, max_iters)

    sx = IntervalMatrix(fals.lo, fals.hi)
    box = clock.run("step4", step4_reach, problem, sx, cfg, threads)
    bundle = SensitivityBundle(sx_set=sx, method="sampling_falsification", grid_per_dim=int(a))
    return ReachResult(over_approx=box, bundle=bundle, timings=clock.timings)


def monte_carlo_check(problem, result, count=500, seed=0, cfg=None, threads=None, rel_slack=1e-6):
    """Containment of random endpoints in ``result.over_approx``.

    Initial states are uniform in X0 from ``numpy.random.default_rng(seed)``.
    The slack is ``rel_slack`` times the infinity-norm diameter of the box.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    n = problem.model.n
    lo, hi = problem.x0.lo, problem.x0.hi
    rng = np.random.default_rng(seed)
    starts = lo + (hi - lo) * rng.random((count, n))
    ends = flow_many(problem.model, problem.t0, problem.tf, starts, cfg, threads)
    box = result.over_approx if isinstance(result, ReachResult) else result
    slack = rel_slack * float(np.max(box.hi - box.lo, initial=0.0))
    excess = np.maximum(box.lo - ends, ends - box.hi)
    inside = np.all(excess <= slack, axis=1)
    report = MonteCarloReport(
        count=count,
        seed=seed,
        fraction_contained=float(inside.mean()),
        worst_violation=np.maximum(excess.max(axis=0), 0.0),
        slack=slack,
        initial_states=starts,
        endpoints=ends,
    )
    if isinstance(result, ReachResult):
        result.mc_report = report
    return report
