"""Uniform sample grids, their dispersion, and sampled sensitivity bounds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .interval import IntervalMatrix, iv_abs_sup

__all__ = ["SampleGrid", "dilation", "dispersion_check", "sensitivity_bounds_from_samples", "uniform_grid"]


@dataclass(frozen=True, eq=False)
class SampleGrid:
    points: np.ndarray  # (N, n), lexicographic with the first dimension varying slowest
    per_dim: int
    dispersion: float
    width: np.ndarray = None  # side lengths of the sampled box

    def __len__(self):
        return len(self.points)

    @property
    def coordinate_dispersion(self):
        """Per-coordinate distance bound ``w_i / (2a)`` to the nearest grid point."""
        return self.width / (2 * self.per_dim)


def uniform_grid(x0, a):
    """Cell-centred grid with ``a`` points per non-degenerate dimension.

    Dimension ``i`` uses ``lo_i + (k + 1/2) w_i / a`` for ``k < a``; a
    dimension of zero width contributes its single value. The dispersion
    is ``max_i w_i / (2a)``.
    """
    a = int(a)
    if a < 1:
        raise ValueError("grid needs at least one point per dimension (a >= 1)")
    lo, hi = np.asarray(x0.lo, dtype=np.float64), np.asarray(x0.hi, dtype=np.float64)
    if lo.ndim != 1:
        raise DimensionError("initial set must be an interval vector")
    width = hi - lo
    axes = []
    for lo_i, w_i in zip(lo, width):
        if w_i == 0.0:
            axes.append(np.array([lo_i]))
        else:
            axes.append(lo_i + (np.arange(a) + 0.5) * (w_i / a))
    points = np.array(list(itertools.product(*axes)), dtype=np.float64).reshape(-1, len(lo))
    return SampleGrid(points=points, per_dim=a, dispersion=float(width.max(initial=0.0)) / (2 * a), width=width)


def dispersion_check(grid, x0, resolution=33, chunk=4096):
    """Brute-force ``sup_x min_y ||x - y||_inf`` over a dense grid of the box.

    The dense grid has ``resolution`` points per dimension including both
    endpoints, so the estimate is a lower bound that is exact whenever the
    maximiser lies on it.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    lo, hi = np.asarray(x0.lo), np.asarray(x0.hi)
    axes = [np.linspace(l, h, resolution) for l, h in zip(lo, hi)]
    ys = np.asarray(grid.points if isinstance(grid, SampleGrid) else grid, dtype=np.float64)
    best = 0.0
    dense = itertools.product(*axes)
    while True:
        block = np.array(list(itertools.islice(dense, chunk)))
        if block.size == 0:
            return best
        dist = np.abs(block[:, None, :] - ys[None, :, :]).max(axis=2).min(axis=1)
        best = max(best, float(dist.max()))


def dilation(sxx_bounds, d):
    """Per-entry dilation ``M = max(|Sxx_lo|, |Sxx_hi|) (I kron 1 d)``.

    ``M[i, j] = d * sum_k max|Sxx[i, j*n + k]|``. A length-``n`` array ``d``
    gives each initial-state coordinate its own distance bound.
    """
    n = sxx_bounds.shape[0]
    if sxx_bounds.shape != (n, n * n):
        raise DimensionError(f"Sxx bounds must be n x n^2, got {sxx_bounds.shape}")
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0):
        raise ValueError("dispersion must be non-negative")
    blocks = iv_abs_sup(sxx_bounds).reshape(n, n, n)  # [i, j, k]
    if d.ndim == 0:
        return blocks.sum(axis=2) * d
    if d.shape != (n,):
        raise DimensionError(f"per-dimension dispersion must have length {n}")
    return (blocks * d[None, None, :]).sum(axis=2)


def sensitivity_bounds_from_samples(sxx_bounds, samples, d):
    """Hull of sampled ``Sx`` values dilated by :func:`dilation`."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 2:
        samples = samples[None]
    if samples.shape[0] == 0:
        raise ValueError("at least one sensitivity sample is required")
    n = sxx_bounds.shape[0]
    if samples.shape[1:] != (n, n):
        raise DimensionError(f"samples must be {n}x{n} matrices, got {samples.shape[1:]}")
    m = dilation(sxx_bounds, d)
    return IntervalMatrix(samples.min(axis=0) - m, samples.max(axis=0) + m)
