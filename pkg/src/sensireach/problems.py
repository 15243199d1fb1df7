"""Canonical reachability problems used by the tests, benchmarks and CLI."""

import math

import numpy as np

from .interval import IntervalMatrix
from .models import make_linear, make_riccati, make_unicycle
from .pipeline import ReachProblem

UNICYCLE_X0 = (
    (0.0, 1.0),
    (0.0, 1.0),
    (math.pi / 8, 2 * math.pi / 8),
    (-0.05, 0.05),
    (-0.05, 0.05),
    (-0.03, 0.03),
)

# Metzler with nonnegative exponential: a monotone (sign-stable) system.
MONOTONE_A = ((-1.0, 0.5), (0.3, -0.8))
ROTATION_A = ((-0.1, 1.0), (-1.0, -0.1))


def unicycle_problem(v=0.25, omega=0.3, tf=10.0):
    return ReachProblem(make_unicycle(v, omega), 0.0, tf, IntervalMatrix.from_pairs(UNICYCLE_X0))


def riccati_problem(x_lo=0.4, x_hi=0.5, tf=1.0):
    return ReachProblem(make_riccati(x_lo, x_hi, tf), 0.0, tf, IntervalMatrix.from_pairs([(x_lo, x_hi)]))


def linear_problem(a=MONOTONE_A, box=((0.5, 1.0), (-0.2, 0.3)), tf=1.0):
    return ReachProblem(make_linear(np.array(a)), 0.0, tf, IntervalMatrix.from_pairs(box))


def builtin_problems():
    return {
        "unicycle": unicycle_problem(),
        "riccati": riccati_problem(),
        "linear_monotone": linear_problem(),
        "linear_rotation": linear_problem(ROTATION_A),
    }
